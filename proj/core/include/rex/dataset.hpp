#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rex {

struct StringLabel {
    std::string s;
    bool positive = false;
};

/// Windowed dataset generation parameters; the length window and split
/// fraction defaults come per grammar from the benchmark table
/// (see table1_dataset_config).
struct DatasetConfig {
    int grammar = 1;
    int min_length = 1;
    int max_length = 14;
    double train_fraction = 0.5;
    bool oversample_positives = false;
    std::uint64_t seed = 0;
    /// Cap on total distinct strings before splitting; 0 keeps the whole
    /// window (both classes are subsampled proportionally when capped).
    std::size_t max_strings = 0;
};

struct LabeledDataset {
    DatasetConfig config;
    std::vector<StringLabel> train;
    std::vector<StringLabel> test;
};

/// Sequence of one-hot steps over symbols {0, 1, stop = 2}; the stop symbol
/// is always the final step.
struct EncodedSequence {
    std::vector<std::uint8_t> symbols;

    std::size_t size() const { return symbols.size(); }
    std::array<double, 3> one_hot(std::size_t t) const {
        std::array<double, 3> v{0.0, 0.0, 0.0};
        v[symbols.at(t)] = 1.0;
        return v;
    }
};

/// All 2^n strings of length n in lexicographic order with ground-truth
/// labels for the grammar. n must be at most 24.
std::vector<StringLabel> enumerate_labeled(int grammar, unsigned n);

/// Positives enumerated from the grammar over the length window, negatives
/// drawn from a seeded random-bit oracle and verified against the ground
/// truth, deduplicated, split per class by the train fraction. With
/// oversample_positives, training positives are duplicated (with
/// replacement) until the training split is class-balanced; the test split
/// is never oversampled. Throws when the window holds no positive string.
LabeledDataset build_dataset(const DatasetConfig& config);

/// One-hot encoding with the trailing stop symbol. Empty strings are
/// rejected.
EncodedSequence encode(const std::string& s);

/// Per-grammar window, split fraction, oversampling flag and parameter
/// budget of the benchmark table.
DatasetConfig table1_dataset_config(int grammar);
int table1_param_budget(int grammar);

std::string dataset_to_jsonl(const LabeledDataset& ds);
std::string dataset_config_to_json(const DatasetConfig& config);
DatasetConfig dataset_config_from_json(const std::string& text);
LabeledDataset dataset_from_jsonl(const std::string& text, const DatasetConfig& config);

}  // namespace rex
