#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rex/dataset.hpp"
#include "rex/dfa.hpp"
#include "rex/rnn.hpp"

namespace rex {

/// One observed hidden vector. step 0 is the shared initial vector
/// (sym = -1); the point after the last binary symbol has is_end set.
/// response is the mapped value of the vector's response component.
struct StatePoint {
    std::vector<double> h;
    int string_id = 0;
    int step = 0;
    int sym = -1;
    double response = 0.0;
    bool is_end = false;
};

/// Hidden vectors collected over a split, grouped per string. points holds
/// the initial vector plus one vector per binary symbol; the vector after
/// the stop symbol is kept aside per string and only feeds accept labeling.
struct CollectedStates {
    std::vector<StatePoint> points;
    std::vector<StatePoint> stop_points;     // one per string
    std::vector<std::size_t> offsets;        // string i spans [offsets[i], offsets[i+1])
    std::vector<std::uint8_t> labels;        // dataset label per string

    std::size_t string_count() const { return stop_points.size(); }
    std::size_t total_points() const { return points.size() + stop_points.size(); }
};

CollectedStates collect_states(const RnnModel& model, std::span<const StringLabel> split,
                               const std::vector<double>& h0);

struct Clustering {
    int requested_k = 0;
    std::vector<std::vector<double>> centroids;  // live clusters only
    std::vector<int> assignment;                 // per point, into centroids
    std::vector<double> inertia_history;         // per Lloyd iteration

    int live_count() const { return static_cast<int>(centroids.size()); }
    double inertia() const { return inertia_history.empty() ? 0.0 : inertia_history.back(); }
};

/// Lloyd's k-means with seeded farthest-point initialization; iterates to an
/// assignment fixpoint or 100 rounds, then drops empty clusters. Ties in
/// nearest-centroid assignment go to the lowest centroid index.
Clustering kmeans(std::span<const StatePoint> points, int k, std::uint64_t seed);

/// Observed transition multiset: counts[cluster][symbol] maps target
/// cluster to the number of observed consecutive point pairs.
struct TransitionCounts {
    std::vector<std::array<std::map<int, int>, 2>> counts;
};

/// Where a cluster's accept vote comes from: the response after the stop
/// symbol (default) or after the last binary symbol.
enum class LabelSource { AfterStop, LastBinary };

struct TransitionDiagram {
    Dfa dfa;  // possibly partial
    TransitionCounts counts;
};

/// Majority-filtered transition diagram: per (cluster, symbol) the most
/// frequent observed target wins (ties to the lowest cluster index); the
/// start state is the initial point's cluster; a cluster accepts when the
/// mean response of its member end-of-string points is >= 0.5.
TransitionDiagram build_transition_diagram(const Clustering& clustering,
                                           const CollectedStates& collected,
                                           LabelSource label_source = LabelSource::AfterStop);

/// Full pipeline on the deduplicated training split: collect, quantize,
/// build the diagram, complete, minimize.
Dfa extract_dfa(const RnnModel& model, const LabeledDataset& dataset, int k,
                std::uint64_t seed, const std::vector<double>& h0,
                LabelSource label_source = LabelSource::AfterStop);

/// Fraction of split strings whose automaton verdict matches the label.
double evaluate_dfa(const Dfa& dfa, std::span<const StringLabel> split);

}  // namespace rex
