#include "rex/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rex/rng.hpp"

namespace rex {

namespace {

namespace fs = std::filesystem;

nlohmann::json record_to_json(const ExperimentSpec& spec, const RunRecord& r) {
    nlohmann::json j;
    j["grammar"] = spec.grammar;
    j["arch"] = to_string(spec.arch);
    j["activation"] = to_string(spec.activation);
    j["trial"] = r.trial;
    j["seed"] = r.trial_seed;
    j["K"] = r.k;
    j["converged"] = r.converged;
    j["accuracy"] = r.accuracy;
    j["isomorphic"] = r.isomorphic;
    j["live_states"] = r.live_states;
    return j;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

ExperimentSpec default_spec(int grammar, Arch arch, Activation activation) {
    ExperimentSpec spec;
    spec.grammar = grammar;
    spec.arch = arch;
    spec.activation = activation;
    spec.dataset = table1_dataset_config(grammar);
    spec.target_params = table1_param_budget(grammar);
    return spec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir) {
    if (spec.trials < 1 || spec.k_min > spec.k_max)
        throw std::invalid_argument("run_experiment: empty grid");

    LabeledDataset dataset = build_dataset(spec.dataset);
    if (dataset.test.empty()) throw std::runtime_error("run_experiment: empty test split");

    int budget = spec.target_params > 0 ? spec.target_params : table1_param_budget(spec.grammar);
    ModelConfig base_config;
    base_config.arch = spec.arch;
    base_config.activation = spec.activation;
    base_config.input = 3;
    base_config.hidden = budget_hidden_size(spec.arch, budget, 3);

    Dfa ground_truth = minimize(complete(tomita_dfa(spec.grammar)));

    std::ofstream partial;
    std::mutex emit_mutex;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        partial.open(fs::path(out_dir) / "records.partial.jsonl", std::ios::binary | std::ios::app);
    }

    ExperimentResult result;
    result.spec = spec;
    result.records.resize(static_cast<std::size_t>(spec.grid_size()));

    struct TrialBest {
        bool valid = false;
        double acc = -1.0;
        bool iso = false;
        Dfa dfa;
    };
    std::vector<TrialBest> best_per_trial(spec.trials);

    int ks = spec.k_max - spec.k_min + 1;
    auto run_trial = [&](int trial) {
        std::uint64_t trial_seed = spec.base_seed + static_cast<std::uint64_t>(trial);
        ModelConfig config = base_config;
        config.seed = trial_seed;
        RnnModel model = init_model(config);
        std::vector<double> h0 = make_h0(model.config, trial_seed);
        TrainResult trained = train(model, dataset, spec.train, h0);

        TrialBest& best = best_per_trial[trial];
        for (int k = spec.k_min; k <= spec.k_max; ++k) {
            auto t0 = std::chrono::steady_clock::now();
            std::uint64_t kmeans_seed = spec.base_seed * 1000003ull
                                        + static_cast<std::uint64_t>(trial) * 131ull
                                        + static_cast<std::uint64_t>(k);
            Dfa extracted = extract_dfa(model, dataset, k, kmeans_seed, h0);
            RunRecord rec;
            rec.trial = trial;
            rec.trial_seed = trial_seed;
            rec.k = k;
            rec.converged = trained.converged;
            rec.accuracy = evaluate_dfa(extracted, dataset.test);
            rec.isomorphic = is_isomorphic(extracted, ground_truth);
            rec.live_states = extracted.state_count;
            rec.wall_time_ms = std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - t0)
                                   .count();
            if (!best.valid || rec.accuracy > best.acc
                || (rec.accuracy == best.acc && rec.isomorphic && !best.iso)) {
                best.valid = true;
                best.acc = rec.accuracy;
                best.iso = rec.isomorphic;
                best.dfa = extracted;
            }
            std::size_t slot = static_cast<std::size_t>(trial) * ks + (k - spec.k_min);
            result.records[slot] = rec;
            if (partial.is_open()) {
                std::lock_guard<std::mutex> lock(emit_mutex);
                partial << record_to_json(spec, rec).dump() << "\n";
                partial.flush();
            }
        }
    };

    unsigned want = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
    unsigned pool = std::min<unsigned>(want, static_cast<unsigned>(spec.trials));
    if (pool <= 1) {
        for (int t = 0; t < spec.trials; ++t) run_trial(t);
    } else {
        std::vector<std::thread> workers;
        std::mutex next_mutex;
        int next_trial = 0;
        for (unsigned w = 0; w < pool; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    int trial;
                    {
                        std::lock_guard<std::mutex> lock(next_mutex);
                        if (next_trial >= spec.trials) return;
                        trial = next_trial++;
                    }
                    run_trial(trial);
                }
            });
        }
        for (auto& w : workers) w.join();
    }

    // overall best: accuracy first, isomorphic preferred, earliest trial on ties
    const TrialBest* winner = nullptr;
    for (const auto& tb : best_per_trial) {
        if (!tb.valid) continue;
        if (winner == nullptr || tb.acc > winner->acc
            || (tb.acc == winner->acc && tb.iso && !winner->iso)) {
            winner = &tb;
        }
    }
    if (winner != nullptr) {
        result.best_dfa = winner->dfa;
        result.has_best = true;
    }
    return result;
}

ExperimentSummary aggregate(const ExperimentSpec& spec, const std::vector<RunRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    ExperimentSummary s;
    s.grammar = spec.grammar;
    s.arch = spec.arch;
    s.activation = spec.activation;
    s.record_count = records.size();

    std::vector<int> ks;
    for (const auto& r : records) {
        if (std::find(ks.begin(), ks.end(), r.k) == ks.end()) ks.push_back(r.k);
    }
    std::sort(ks.begin(), ks.end());
    for (int k : ks) {
        double sum = 0.0;
        int n = 0;
        for (const auto& r : records) {
            if (r.k == k) {
                sum += r.accuracy;
                ++n;
            }
        }
        double mean = sum / n;
        double var = 0.0;
        for (const auto& r : records) {
            if (r.k == k) var += (r.accuracy - mean) * (r.accuracy - mean);
        }
        s.per_k.push_back({k, mean, var / n});
    }

    double acc_all = 0.0, acc_conv = 0.0;
    std::size_t iso_all = 0, iso_conv = 0, n_conv = 0;
    for (const auto& r : records) {
        acc_all += r.accuracy;
        if (r.isomorphic) ++iso_all;
        if (r.converged) {
            ++n_conv;
            acc_conv += r.accuracy;
            if (r.isomorphic) ++iso_conv;
        }
    }
    s.converged_count = n_conv;
    s.overall_acc = acc_all / static_cast<double>(records.size());
    s.success_rate = static_cast<double>(iso_all) / static_cast<double>(records.size());
    s.overall_acc_converged = n_conv ? acc_conv / static_cast<double>(n_conv) : 0.0;
    s.success_rate_converged = n_conv ? static_cast<double>(iso_conv) / static_cast<double>(n_conv) : 0.0;
    return s;
}

std::string records_to_jsonl(const ExperimentSpec& spec, const std::vector<RunRecord>& records) {
    std::ostringstream os;
    for (const auto& r : records) os << record_to_json(spec, r).dump() << "\n";
    return os.str();
}

std::vector<RunRecord> records_from_jsonl(const std::string& text) {
    std::vector<RunRecord> records;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        RunRecord r;
        r.trial = j.at("trial").get<int>();
        r.trial_seed = j.at("seed").get<std::uint64_t>();
        r.k = j.at("K").get<int>();
        r.converged = j.at("converged").get<bool>();
        r.accuracy = j.at("accuracy").get<double>();
        r.isomorphic = j.at("isomorphic").get<bool>();
        r.live_states = j.at("live_states").get<int>();
        records.push_back(r);
    }
    return records;
}

void export_results(const ExperimentSummary& summary, const ExperimentResult& result,
                    const std::string& out_dir) {
    if (result.records.empty()) throw std::invalid_argument("export_results: no records");
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("export_results: cannot create " + dir.string());

    write_file(dir / "records.jsonl", records_to_jsonl(result.spec, result.records));

    std::ostringstream per_k;
    per_k << "K,mean_acc,var_acc\n";
    for (const auto& ks : summary.per_k) {
        per_k << ks.k << "," << format_double(ks.mean_acc) << "," << format_double(ks.var_acc) << "\n";
    }
    write_file(dir / "per_k.csv", per_k.str());

    std::ostringstream overall;
    overall << "grammar,arch,activation,overall_acc,success_rate,"
               "overall_acc_converged,success_rate_converged,records,converged_records\n";
    overall << summary.grammar << "," << to_string(summary.arch) << ","
            << to_string(summary.activation) << "," << format_double(summary.overall_acc) << ","
            << format_double(summary.success_rate) << ","
            << format_double(summary.overall_acc_converged) << ","
            << format_double(summary.success_rate_converged) << "," << summary.record_count << ","
            << summary.converged_count << "\n";
    write_file(dir / "overall.csv", overall.str());

    if (result.has_best) write_file(dir / "best.dot", to_dot(result.best_dfa));

    nlohmann::json line_plot;
    line_plot["type"] = "line";
    line_plot["title"] = "Extracted DFA accuracy vs K (grammar " + std::to_string(summary.grammar)
                         + ", " + to_string(summary.arch) + "-" + to_string(summary.activation) + ")";
    line_plot["x_label"] = "K";
    line_plot["y_label"] = "accuracy";
    std::vector<int> xs;
    std::vector<double> means, vars;
    for (const auto& ks : summary.per_k) {
        xs.push_back(ks.k);
        means.push_back(ks.mean_acc);
        vars.push_back(ks.var_acc);
    }
    line_plot["x"] = xs;
    line_plot["series"] = nlohmann::json::array({
        nlohmann::json{{"name", "mean_accuracy"}, {"values", means}},
        nlohmann::json{{"name", "accuracy_variance"}, {"values", vars}},
    });
    write_file(dir / "accuracy_vs_k.plot.json", line_plot.dump(2) + "\n");

    nlohmann::json bar_plot;
    bar_plot["type"] = "bar";
    bar_plot["title"] = "DFA extraction success rate";
    bar_plot["categories"] = nlohmann::json::array(
        {"G" + std::to_string(summary.grammar) + " " + to_string(summary.arch) + "-"
         + to_string(summary.activation)});
    bar_plot["series"] = nlohmann::json::array({
        nlohmann::json{{"name", "success_rate"}, {"values", {summary.success_rate}}},
        nlohmann::json{{"name", "success_rate_converged_only"},
                       {"values", {summary.success_rate_converged}}},
    });
    write_file(dir / "success_rate.plot.json", bar_plot.dump(2) + "\n");

    // the incremental partial file is superseded by records.jsonl
    fs::remove(dir / "records.partial.jsonl", ec);
}

std::string experiment_spec_to_json(const ExperimentSpec& spec) {
    nlohmann::json j;
    j["grammar"] = spec.grammar;
    j["arch"] = to_string(spec.arch);
    j["activation"] = to_string(spec.activation);
    j["trials"] = spec.trials;
    j["k_min"] = spec.k_min;
    j["k_max"] = spec.k_max;
    j["target_params"] = spec.target_params;
    j["base_seed"] = spec.base_seed;
    j["threads"] = spec.threads;
    j["dataset"] = nlohmann::json::parse(dataset_config_to_json(spec.dataset));
    j["train"] = {
        {"learning_rate", spec.train.learning_rate},
        {"rms_decay", spec.train.rms_decay},
        {"rms_epsilon", spec.train.rms_epsilon},
        {"max_epochs", spec.train.max_epochs},
        {"loss_tolerance", spec.train.loss_tolerance},
    };
    return j.dump(2);
}

ExperimentSpec experiment_spec_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentSpec spec;
    spec.grammar = j.at("grammar").get<int>();
    spec.arch = arch_from_string(j.value("arch", "second_order"));
    spec.activation = activation_from_string(j.value("activation", "sigmoid"));
    spec.trials = j.value("trials", 10);
    spec.k_min = j.value("k_min", 3);
    spec.k_max = j.value("k_max", 15);
    spec.target_params = j.value("target_params", 0);
    spec.base_seed = j.value("base_seed", std::uint64_t{0});
    spec.threads = j.value("threads", 0);
    if (j.contains("dataset")) {
        spec.dataset = dataset_config_from_json(j.at("dataset").dump());
    } else {
        spec.dataset = table1_dataset_config(spec.grammar);
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        spec.train.learning_rate = t.value("learning_rate", 1e-3);
        spec.train.rms_decay = t.value("rms_decay", 0.9);
        spec.train.rms_epsilon = t.value("rms_epsilon", 1e-8);
        spec.train.max_epochs = t.value("max_epochs", 2000);
        spec.train.loss_tolerance = t.value("loss_tolerance", 1e-3);
    }
    return spec;
}

}  // namespace rex
