#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rex/dataset.hpp"
#include "rex/dfa.hpp"
#include "rex/extraction.hpp"
#include "rex/rnn.hpp"

namespace rex {

/// One (model, grammar) experiment: per trial a fresh hidden-layer
/// initialization and training run, then one extraction per K in the range.
/// The default grid (10 trials, K in [3, 15]) yields 130 extraction runs.
struct ExperimentSpec {
    int grammar = 1;
    Arch arch = Arch::SecondOrder;
    Activation activation = Activation::Sigmoid;
    int trials = 10;
    int k_min = 3;
    int k_max = 15;
    DatasetConfig dataset;
    TrainConfig train;
    /// Parameter budget used to size the hidden layer; 0 picks the
    /// grammar's benchmark-table budget.
    int target_params = 0;
    std::uint64_t base_seed = 0;
    int threads = 0;  // 0 = hardware concurrency

    int grid_size() const { return trials * (k_max - k_min + 1); }
};

struct RunRecord {
    int trial = 0;
    std::uint64_t trial_seed = 0;
    int k = 0;
    bool converged = false;
    double accuracy = 0.0;       // extracted DFA on the test split
    bool isomorphic = false;     // to the ground-truth automaton
    int live_states = 0;         // states of the minimized extracted DFA
    double wall_time_ms = 0.0;   // console diagnostics only, never persisted
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<RunRecord> records;  // sorted by (trial, k)
    Dfa best_dfa;                    // highest accuracy, isomorphic preferred
    bool has_best = false;
};

struct KSummary {
    int k = 0;
    double mean_acc = 0.0;
    double var_acc = 0.0;
};

struct ExperimentSummary {
    int grammar = 0;
    Arch arch = Arch::SecondOrder;
    Activation activation = Activation::Sigmoid;
    std::size_t record_count = 0;
    std::size_t converged_count = 0;
    std::vector<KSummary> per_k;            // over all records
    double overall_acc = 0.0;               // over all records
    double success_rate = 0.0;              // isomorphic fraction, all records
    double overall_acc_converged = 0.0;     // converged-trial records only
    double success_rate_converged = 0.0;
};

/// Benchmark-table defaults for the grammar (window, split, oversampling,
/// parameter budget) with the standard 10-trial, K in [3,15] grid.
ExperimentSpec default_spec(int grammar, Arch arch, Activation activation);

/// Runs the grid. Trials execute in parallel; records are persisted
/// incrementally to <out_dir>/records.partial.jsonl when out_dir is given
/// and returned sorted by (trial, K).
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir = "");

ExperimentSummary aggregate(const ExperimentSpec& spec, const std::vector<RunRecord>& records);

/// Writes records.jsonl, per_k.csv, overall.csv, best.dot and the plot
/// documents accuracy_vs_k.plot.json / success_rate.plot.json. Re-exporting
/// the same result is byte-identical. Throws on empty records.
void export_results(const ExperimentSummary& summary, const ExperimentResult& result,
                    const std::string& out_dir);

std::string records_to_jsonl(const ExperimentSpec& spec, const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_jsonl(const std::string& text);

std::string experiment_spec_to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_spec_from_json(const std::string& text);

}  // namespace rex
