#include "rex/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"
#include "rex/dfa.hpp"
#include "rex/rng.hpp"

namespace rex {

namespace {

std::string bits_to_string(std::uint32_t bits, unsigned n) {
    std::string s(n, '0');
    for (unsigned i = 0; i < n; ++i) {
        if (bits & (1u << (n - 1 - i))) s[i] = '1';
    }
    return s;
}

long long split_count(double fraction, std::size_t n) {
    long long k = std::llround(fraction * static_cast<double>(n));
    k = std::clamp<long long>(k, 0, static_cast<long long>(n));
    // keep both splits inhabited when the class has at least two members
    if (n >= 2) k = std::clamp<long long>(k, 1, static_cast<long long>(n) - 1);
    return k;
}

}  // namespace

std::vector<StringLabel> enumerate_labeled(int grammar, unsigned n) {
    if (n > 24) throw std::invalid_argument("enumerate_labeled: length above 24");
    Dfa g = tomita_dfa(grammar);
    std::vector<StringLabel> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint32_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        std::string s = bits_to_string(bits, n);
        out.push_back({s, run(g, s)});
    }
    return out;
}

LabeledDataset build_dataset(const DatasetConfig& config) {
    if (config.min_length <= 0 || config.min_length > config.max_length)
        throw std::invalid_argument("build_dataset: bad length window");
    if (config.max_length > 24) throw std::invalid_argument("build_dataset: window above 24");
    if (config.train_fraction <= 0.0 || config.train_fraction >= 1.0)
        throw std::invalid_argument("build_dataset: train fraction must be in (0,1)");

    Dfa g = tomita_dfa(config.grammar);
    Rng rng(mix_seed(config.seed, 0xda7a));

    // exhaustive positives over the window
    std::vector<std::string> positives;
    std::size_t window_size = 0;
    for (int len = config.min_length; len <= config.max_length; ++len) {
        window_size += std::size_t{1} << len;
        for (std::uint32_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
            std::string s = bits_to_string(bits, static_cast<unsigned>(len));
            if (run(g, s)) positives.push_back(std::move(s));
        }
    }
    if (positives.empty())
        throw std::runtime_error("build_dataset: length window contains no positive strings");

    std::size_t total_target = config.max_strings == 0
                                   ? window_size
                                   : std::min(config.max_strings, window_size);
    std::size_t neg_available = window_size - positives.size();

    // capped datasets keep every positive of a scarce class (up to half the
    // target); an abundant class is subsampled to half
    std::size_t pos_target = positives.size();
    if (total_target < window_size) {
        pos_target = std::min(positives.size(), std::max<std::size_t>(1, total_target / 2));
    }
    std::size_t neg_target = std::min(total_target - pos_target, neg_available);

    if (pos_target < positives.size()) {
        rng.shuffle(positives);
        positives.resize(pos_target);
        std::sort(positives.begin(), positives.end());
    }

    // negatives from the random-bit oracle, verified and deduplicated
    std::vector<std::string> negatives;
    std::unordered_set<std::string> seen;
    if (neg_target >= (neg_available * 3) / 4) {
        // near-exhaustive demand: enumerate, shuffle, take a prefix
        for (int len = config.min_length; len <= config.max_length; ++len) {
            for (std::uint32_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
                std::string s = bits_to_string(bits, static_cast<unsigned>(len));
                if (!run(g, s)) negatives.push_back(std::move(s));
            }
        }
        rng.shuffle(negatives);
        negatives.resize(neg_target);
    } else {
        while (negatives.size() < neg_target) {
            int len = config.min_length
                      + static_cast<int>(rng.next_below(config.max_length - config.min_length + 1));
            std::string s(static_cast<std::size_t>(len), '0');
            for (auto& ch : s) ch = (rng.next_u64() & 1) ? '1' : '0';
            if (run(g, s)) continue;
            if (!seen.insert(s).second) continue;
            negatives.push_back(std::move(s));
        }
    }

    // stratified split keeps train/test disjoint per class
    LabeledDataset ds;
    ds.config = config;
    auto split_class = [&](std::vector<std::string>& items, bool label) {
        rng.shuffle(items);
        std::size_t k = static_cast<std::size_t>(split_count(config.train_fraction, items.size()));
        for (std::size_t i = 0; i < items.size(); ++i) {
            (i < k ? ds.train : ds.test).push_back({items[i], label});
        }
    };
    split_class(positives, true);
    split_class(negatives, false);

    if (config.oversample_positives) {
        std::vector<std::size_t> pos_idx;
        std::size_t neg_count = 0;
        for (std::size_t i = 0; i < ds.train.size(); ++i) {
            if (ds.train[i].positive) {
                pos_idx.push_back(i);
            } else {
                ++neg_count;
            }
        }
        if (!pos_idx.empty()) {
            std::size_t pos_count = pos_idx.size();
            while (pos_count < neg_count) {
                ds.train.push_back(ds.train[pos_idx[rng.next_below(pos_idx.size())]]);
                ++pos_count;
            }
        }
    }
    rng.shuffle(ds.train);
    rng.shuffle(ds.test);
    return ds;
}

EncodedSequence encode(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("encode: empty strings are rejected");
    EncodedSequence seq;
    seq.symbols.reserve(s.size() + 1);
    for (char ch : s) {
        if (ch != '0' && ch != '1') throw std::invalid_argument("encode: symbol outside {0,1}");
        seq.symbols.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    seq.symbols.push_back(2);
    return seq;
}

DatasetConfig table1_dataset_config(int grammar) {
    DatasetConfig c;
    c.grammar = grammar;
    switch (grammar) {
        case 1: c.min_length = 1; c.max_length = 14; c.train_fraction = 0.078; c.oversample_positives = true; break;
        case 2: c.min_length = 2; c.max_length = 14; c.train_fraction = 0.065; c.oversample_positives = true; break;
        case 3: c.min_length = 4; c.max_length = 12; c.train_fraction = 0.367; break;
        case 4: c.min_length = 3; c.max_length = 12; c.train_fraction = 0.367; break;
        case 5: c.min_length = 4; c.max_length = 12; c.train_fraction = 0.367; break;
        case 6: c.min_length = 3; c.max_length = 12; c.train_fraction = 0.367; break;
        case 7: c.min_length = 1; c.max_length = 16; c.train_fraction = 0.089; c.oversample_positives = true; break;
        default: throw std::invalid_argument("table1_dataset_config: grammar must be in 1..7");
    }
    return c;
}

int table1_param_budget(int grammar) {
    switch (grammar) {
        case 1: case 2: case 3: case 4: case 7: return 1220;
        case 5: return 30100;
        case 6: return 10502;
        default: throw std::invalid_argument("table1_param_budget: grammar must be in 1..7");
    }
}

std::string dataset_to_jsonl(const LabeledDataset& ds) {
    std::ostringstream os;
    auto emit = [&](const StringLabel& sl, const char* split) {
        nlohmann::json j;
        j["s"] = sl.s;
        j["y"] = sl.positive ? 1 : 0;
        j["split"] = split;
        os << j.dump() << "\n";
    };
    for (const auto& sl : ds.train) emit(sl, "train");
    for (const auto& sl : ds.test) emit(sl, "test");
    return os.str();
}

std::string dataset_config_to_json(const DatasetConfig& c) {
    nlohmann::json j;
    j["grammar"] = c.grammar;
    j["min_length"] = c.min_length;
    j["max_length"] = c.max_length;
    j["train_fraction"] = c.train_fraction;
    j["oversample_positives"] = c.oversample_positives;
    j["seed"] = c.seed;
    j["max_strings"] = c.max_strings;
    return j.dump(2);
}

DatasetConfig dataset_config_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    DatasetConfig c;
    c.grammar = j.at("grammar").get<int>();
    c.min_length = j.at("min_length").get<int>();
    c.max_length = j.at("max_length").get<int>();
    c.train_fraction = j.at("train_fraction").get<double>();
    c.oversample_positives = j.value("oversample_positives", false);
    c.seed = j.value("seed", std::uint64_t{0});
    c.max_strings = j.value("max_strings", std::size_t{0});
    return c;
}

LabeledDataset dataset_from_jsonl(const std::string& text, const DatasetConfig& config) {
    LabeledDataset ds;
    ds.config = config;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        StringLabel sl{j.at("s").get<std::string>(), j.at("y").get<int>() != 0};
        if (j.at("split").get<std::string>() == "train") {
            ds.train.push_back(std::move(sl));
        } else {
            ds.test.push_back(std::move(sl));
        }
    }
    return ds;
}

}  // namespace rex
