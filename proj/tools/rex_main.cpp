// rex: train recurrent networks on the Tomita grammars, extract DFAs from
// their hidden-state dynamics, and compute grammar complexity metrics.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rex/complexity.hpp"
#include "rex/dataset.hpp"
#include "rex/dfa.hpp"
#include "rex/extraction.hpp"
#include "rex/harness.hpp"
#include "rex/rnn.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

rex::LabeledDataset load_dataset_dir(const std::string& dir) {
    rex::DatasetConfig config =
        rex::dataset_config_from_json(slurp((fs::path(dir) / "dataset.config.json").string()));
    return rex::dataset_from_jsonl(slurp((fs::path(dir) / "dataset.jsonl").string()), config);
}

std::vector<unsigned> parse_lengths(const std::string& csv) {
    std::vector<unsigned> out;
    std::istringstream is(csv);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (!tok.empty()) out.push_back(static_cast<unsigned>(std::stoul(tok)));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DFA extraction from recurrent networks on the Tomita grammars"};
    app.require_subcommand(1);

    // ---- generate ----
    auto* gen = app.add_subcommand("generate", "Build a labeled dataset for one grammar");
    int gen_grammar = 1;
    int gen_min = 0, gen_max = 0;
    double gen_frac = 0.0;
    bool gen_oversample = false;
    std::uint64_t gen_seed = 0;
    std::size_t gen_cap = 0;
    std::string gen_out;
    gen->add_option("--grammar", gen_grammar, "Tomita grammar index 1..7")->required();
    gen->add_option("--min-len", gen_min, "Minimum string length (default: benchmark table)");
    gen->add_option("--max-len", gen_max, "Maximum string length (default: benchmark table)");
    gen->add_option("--train-frac", gen_frac, "Training split fraction (default: benchmark table)");
    gen->add_flag("--oversample,!--no-oversample", gen_oversample,
                  "Oversample training positives (default: per grammar)");
    gen->add_option("--seed", gen_seed, "Generation seed");
    gen->add_option("--max-strings", gen_cap, "Cap on total distinct strings (0 = whole window)");
    gen->add_option("--out", gen_out, "Output directory")->required();

    // ---- train ----
    auto* tr = app.add_subcommand("train", "Train one recurrent network");
    int tr_grammar = 1;
    std::string tr_arch = "second_order", tr_act = "sigmoid", tr_dataset, tr_out;
    int tr_params = 0, tr_hidden = 0, tr_epochs = 2000;
    double tr_lr = 1e-3;
    std::uint64_t tr_seed = 0;
    tr->add_option("--grammar", tr_grammar, "Tomita grammar index 1..7");
    tr->add_option("--arch", tr_arch, "elman|second_order|mi_rnn|lstm|gru");
    tr->add_option("--activation", tr_act, "sigmoid|tanh (elman/second_order only)");
    tr->add_option("--dataset", tr_dataset, "Dataset directory from `generate` (default: generated)");
    tr->add_option("--params", tr_params, "Parameter budget (default: benchmark table)");
    tr->add_option("--hidden", tr_hidden, "Hidden size (overrides --params)");
    tr->add_option("--epochs", tr_epochs, "Maximum training epochs");
    tr->add_option("--lr", tr_lr, "Learning rate");
    tr->add_option("--seed", tr_seed, "Weight and h0 seed");
    tr->add_option("--out", tr_out, "Checkpoint path")->required();

    // ---- extract ----
    auto* ex = app.add_subcommand("extract", "Extract a DFA from a trained model");
    std::string ex_model, ex_dataset, ex_out, ex_labels = "stop";
    int ex_k = 8;
    std::uint64_t ex_seed = 0;
    ex->add_option("--model", ex_model, "Checkpoint from `train`")->required();
    ex->add_option("--dataset", ex_dataset, "Dataset directory")->required();
    ex->add_option("--K", ex_k, "Number of k-means clusters");
    ex->add_option("--seed", ex_seed, "Clustering seed");
    ex->add_option("--label-source", ex_labels,
                   "Accept-label responses: 'stop' (after the stop symbol) or 'last' "
                   "(after the last binary symbol)");
    ex->add_option("--out", ex_out, "Output directory")->required();

    // ---- metrics ----
    auto* me = app.add_subcommand("metrics", "Entropy and average edit distance per grammar");
    std::string me_lengths = "8,10,12,14", me_out;
    me->add_option("--lengths", me_lengths, "Comma-separated string lengths");
    me->add_option("--out", me_out, "CSV output path (default: stdout)");

    // ---- rings ----
    auto* ri = app.add_subcommand("rings", "Lexicographic ring-plot membership data");
    int ri_grammar = 1;
    unsigned ri_max_n = 8;
    std::string ri_out;
    ri->add_option("--grammar", ri_grammar, "Tomita grammar index 1..7")->required();
    ri->add_option("--max-N", ri_max_n, "Largest ring length (<= 12)");
    ri->add_option("--out", ri_out, "JSON output path (default: stdout)");

    // ---- experiment ----
    auto* xp = app.add_subcommand("experiment", "Run the full trial/K extraction grid");
    int xp_grammar = 1, xp_trials = 10, xp_kmin = 3, xp_kmax = 15, xp_epochs = 0, xp_threads = 0;
    std::string xp_arch = "second_order", xp_act = "sigmoid", xp_config, xp_out;
    std::uint64_t xp_seed = 0;
    std::size_t xp_cap = 0;
    double xp_frac = 0.0;
    xp->add_option("--grammar", xp_grammar, "Tomita grammar index 1..7");
    xp->add_option("--arch", xp_arch, "elman|second_order|mi_rnn|lstm|gru");
    xp->add_option("--activation", xp_act, "sigmoid|tanh");
    xp->add_option("--trials", xp_trials, "Trials with fresh hidden-layer initialization");
    xp->add_option("--k-min", xp_kmin, "Smallest K");
    xp->add_option("--k-max", xp_kmax, "Largest K");
    xp->add_option("--seed", xp_seed, "Base seed for the whole grid");
    xp->add_option("--max-strings", xp_cap, "Dataset size cap (0 = whole window)");
    xp->add_option("--train-frac", xp_frac, "Training split fraction override");
    xp->add_option("--epochs", xp_epochs, "Maximum training epochs override");
    xp->add_option("--threads", xp_threads, "Worker threads (0 = all cores)");
    xp->add_option("--config", xp_config, "ExperimentSpec JSON (overrides the flags above)");
    xp->add_option("--out", xp_out, "Output directory")->required();

    // ---- report ----
    auto* re = app.add_subcommand("report", "Aggregate experiment directories");
    std::vector<std::string> re_in;
    std::string re_out;
    re->add_option("--in", re_in, "Experiment output directories")->required();
    re->add_option("--out", re_out, "Report output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            rex::DatasetConfig config = rex::table1_dataset_config(gen_grammar);
            if (gen_min > 0) config.min_length = gen_min;
            if (gen_max > 0) config.max_length = gen_max;
            if (gen_frac > 0.0) config.train_fraction = gen_frac;
            if (gen->count("--oversample") > 0) config.oversample_positives = gen_oversample;
            config.seed = gen_seed;
            config.max_strings = gen_cap;
            rex::LabeledDataset ds = rex::build_dataset(config);
            spit(fs::path(gen_out) / "dataset.jsonl", rex::dataset_to_jsonl(ds));
            spit(fs::path(gen_out) / "dataset.config.json", rex::dataset_config_to_json(config));
            std::cout << "dataset: " << ds.train.size() << " train / " << ds.test.size()
                      << " test strings -> " << gen_out << "\n";
        } else if (*tr) {
            rex::LabeledDataset ds;
            if (!tr_dataset.empty()) {
                ds = load_dataset_dir(tr_dataset);
                tr_grammar = ds.config.grammar;
            } else {
                rex::DatasetConfig config = rex::table1_dataset_config(tr_grammar);
                config.seed = tr_seed;
                ds = rex::build_dataset(config);
            }
            rex::ModelConfig mc;
            mc.arch = rex::arch_from_string(tr_arch);
            mc.activation = rex::activation_from_string(tr_act);
            mc.input = 3;
            mc.seed = tr_seed;
            int budget = tr_params > 0 ? tr_params : rex::table1_param_budget(tr_grammar);
            mc.hidden = tr_hidden > 0 ? tr_hidden : rex::budget_hidden_size(mc.arch, budget, 3);
            rex::RnnModel model = rex::init_model(mc);
            std::vector<double> h0 = rex::make_h0(model.config, tr_seed);
            rex::TrainConfig tc;
            tc.max_epochs = tr_epochs;
            tc.learning_rate = tr_lr;
            rex::TrainResult result = rex::train(model, ds, tc, h0);
            rex::save_checkpoint(model, h0, tr_out);
            std::ostringstream hist;
            hist << "epoch,mean_loss,train_accuracy\n";
            char buf[96];
            for (std::size_t e = 0; e < result.history.size(); ++e) {
                std::snprintf(buf, sizeof buf, "%zu,%.8f,%.6f", e + 1,
                              result.history[e].mean_loss, result.history[e].train_accuracy);
                hist << buf << "\n";
            }
            spit(tr_out + ".history.csv", hist.str());
            std::cout << "trained " << rex::to_string(mc.arch) << " (hidden " << mc.hidden
                      << ", params " << rex::param_count(mc) << ") on G" << tr_grammar << ": "
                      << (result.converged ? "converged" : "NOT converged") << " after "
                      << result.epochs << " epochs; test accuracy "
                      << rex::accuracy(model, ds.test, h0) << "\n";
            if (!result.converged) return 2;
        } else if (*ex) {
            auto [model, h0] = rex::load_checkpoint(ex_model);
            rex::LabeledDataset ds = load_dataset_dir(ex_dataset);
            rex::LabelSource source;
            if (ex_labels == "stop") {
                source = rex::LabelSource::AfterStop;
            } else if (ex_labels == "last") {
                source = rex::LabelSource::LastBinary;
            } else {
                throw std::runtime_error("--label-source must be 'stop' or 'last'");
            }
            rex::Dfa dfa = rex::extract_dfa(model, ds, ex_k, ex_seed, h0, source);
            rex::Dfa truth = rex::minimize(rex::complete(rex::tomita_dfa(ds.config.grammar)));
            double acc = rex::evaluate_dfa(dfa, ds.test);
            bool iso = rex::is_isomorphic(dfa, truth);
            spit(fs::path(ex_out) / "dfa.json", rex::to_json(dfa) + "\n");
            spit(fs::path(ex_out) / "dfa.dot", rex::to_dot(dfa));
            nlohmann::json rec;
            rec["grammar"] = ds.config.grammar;
            rec["architecture"] = rex::to_string(model.config.arch);
            rec["activation"] = rex::to_string(model.config.activation);
            rec["seed"] = ex_seed;
            rec["K"] = ex_k;
            rec["live_states"] = dfa.state_count;
            rec["accuracy"] = acc;
            rec["is_ground_truth"] = iso;
            spit(fs::path(ex_out) / "record.json", rec.dump(2) + "\n");
            std::cout << "extracted DFA: " << dfa.state_count << " states, accuracy " << acc
                      << (iso ? " (ground truth)" : "") << "\n";
        } else if (*me) {
            std::string csv = rex::metrics_csv(parse_lengths(me_lengths));
            if (me_out.empty()) {
                std::cout << csv;
            } else {
                spit(me_out, csv);
                std::cout << "metrics -> " << me_out << "\n";
            }
        } else if (*ri) {
            auto rings = rex::ring_plot_data(ri_grammar, ri_max_n);
            nlohmann::json j;
            j["grammar"] = ri_grammar;
            j["rings"] = rings;
            std::string text = j.dump() + "\n";
            if (ri_out.empty()) {
                std::cout << text;
            } else {
                spit(ri_out, text);
                std::cout << "rings -> " << ri_out << "\n";
            }
        } else if (*xp) {
            rex::ExperimentSpec spec;
            if (!xp_config.empty()) {
                spec = rex::experiment_spec_from_json(slurp(xp_config));
            } else {
                spec = rex::default_spec(xp_grammar, rex::arch_from_string(xp_arch),
                                         rex::activation_from_string(xp_act));
                spec.trials = xp_trials;
                spec.k_min = xp_kmin;
                spec.k_max = xp_kmax;
                spec.base_seed = xp_seed;
                spec.threads = xp_threads;
                spec.dataset.seed = xp_seed;
                if (xp_cap > 0) spec.dataset.max_strings = xp_cap;
                if (xp_frac > 0.0) spec.dataset.train_fraction = xp_frac;
                if (xp_epochs > 0) spec.train.max_epochs = xp_epochs;
            }
            rex::ExperimentResult result = rex::run_experiment(spec, xp_out);
            rex::ExperimentSummary summary = rex::aggregate(spec, result.records);
            rex::export_results(summary, result, xp_out);
            spit(fs::path(xp_out) / "spec.json", rex::experiment_spec_to_json(spec) + "\n");
            std::cout << "experiment G" << spec.grammar << " " << rex::to_string(spec.arch) << "-"
                      << rex::to_string(spec.activation) << ": " << summary.record_count
                      << " runs, overall accuracy " << summary.overall_acc << ", success rate "
                      << summary.success_rate << " (" << summary.converged_count
                      << " converged-trial runs) -> " << xp_out << "\n";
        } else if (*re) {
            std::ostringstream overall;
            overall << "grammar,arch,activation,overall_acc,success_rate,"
                       "overall_acc_converged,success_rate_converged,records,converged_records\n";
            nlohmann::json bars;
            bars["type"] = "bar";
            bars["title"] = "DFA extraction success rates";
            std::vector<std::string> cats;
            std::vector<double> rates, rates_conv, accs, entropies;
            for (const auto& dir : re_in) {
                rex::ExperimentSpec spec =
                    rex::experiment_spec_from_json(slurp((fs::path(dir) / "spec.json").string()));
                auto records =
                    rex::records_from_jsonl(slurp((fs::path(dir) / "records.jsonl").string()));
                rex::ExperimentSummary s = rex::aggregate(spec, records);
                char buf[256];
                std::snprintf(buf, sizeof buf, "%d,%s,%s,%.6f,%.6f,%.6f,%.6f,%zu,%zu",
                              s.grammar, rex::to_string(s.arch).c_str(),
                              rex::to_string(s.activation).c_str(), s.overall_acc, s.success_rate,
                              s.overall_acc_converged, s.success_rate_converged, s.record_count,
                              s.converged_count);
                overall << buf << "\n";
                cats.push_back("G" + std::to_string(s.grammar) + " " + rex::to_string(s.arch) + "-"
                               + rex::to_string(s.activation));
                rates.push_back(s.success_rate);
                rates_conv.push_back(s.success_rate_converged);
                accs.push_back(s.overall_acc);
                entropies.push_back(rex::entropy_at(s.grammar, 20));
            }
            spit(fs::path(re_out) / "combined_overall.csv", overall.str());
            bars["categories"] = cats;
            bars["series"] = nlohmann::json::array({
                nlohmann::json{{"name", "success_rate"}, {"values", rates}},
                nlohmann::json{{"name", "success_rate_converged_only"}, {"values", rates_conv}},
            });
            spit(fs::path(re_out) / "success_rates.plot.json", bars.dump(2) + "\n");
            nlohmann::json acc_plot;
            acc_plot["type"] = "line";
            acc_plot["title"] = "Average extracted-DFA accuracy and grammar entropy (N = 20)";
            acc_plot["categories"] = cats;
            acc_plot["series"] = nlohmann::json::array({
                nlohmann::json{{"name", "average_accuracy"}, {"values", accs}},
                nlohmann::json{{"name", "entropy_N20"}, {"values", entropies}},
            });
            spit(fs::path(re_out) / "avg_accuracy.plot.json", acc_plot.dump(2) + "\n");
            std::cout << "report over " << re_in.size() << " experiment(s) -> " << re_out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
