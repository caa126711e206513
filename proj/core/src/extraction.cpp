#include "rex/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "rex/rng.hpp"

namespace rex {

CollectedStates collect_states(const RnnModel& model, std::span<const StringLabel> split,
                               const std::vector<double>& h0) {
    if (split.empty()) throw std::invalid_argument("collect_states: empty split");
    CollectedStates out;
    out.offsets.push_back(0);
    int string_id = 0;
    for (const auto& sl : split) {
        EncodedSequence seq = encode(sl.s);
        StateTrace tr = forward(model, seq, h0);
        std::size_t binary_len = sl.s.size();
        for (std::size_t step = 0; step <= binary_len; ++step) {
            StatePoint p;
            p.h = tr.hidden[step];
            p.string_id = string_id;
            p.step = static_cast<int>(step);
            p.sym = step == 0 ? -1 : (sl.s[step - 1] - '0');
            p.response = response01(model, p.h[0]);
            p.is_end = step == binary_len;
            out.points.push_back(std::move(p));
        }
        StatePoint stop;
        stop.h = tr.hidden[binary_len + 1];
        stop.string_id = string_id;
        stop.step = static_cast<int>(binary_len) + 1;
        stop.sym = 2;
        stop.response = response01(model, stop.h[0]);
        out.stop_points.push_back(std::move(stop));
        out.offsets.push_back(out.points.size());
        out.labels.push_back(sl.positive ? 1 : 0);
        ++string_id;
    }
    return out;
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

int nearest_centroid(const std::vector<std::vector<double>>& centroids,
                     const std::vector<double>& p) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = sq_dist(centroids[c], p);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

}  // namespace

Clustering kmeans(std::span<const StatePoint> points, int k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("kmeans: k must be at least 1");
    if (points.empty()) throw std::invalid_argument("kmeans: no points");
    std::size_t n = points.size();
    std::size_t dim = points[0].h.size();

    Clustering cl;
    cl.requested_k = k;

    // farthest-point seeding: seeded first pick, then repeatedly the point
    // with the largest distance to its nearest chosen centroid
    Rng rng(mix_seed(seed, 0x6b6d));
    std::vector<std::size_t> chosen{static_cast<std::size_t>(rng.next_below(n))};
    std::vector<double> min_d(n);
    for (std::size_t i = 0; i < n; ++i) min_d[i] = sq_dist(points[i].h, points[chosen[0]].h);
    while (static_cast<int>(chosen.size()) < k) {
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (min_d[i] > far_d) {
                far_d = min_d[i];
                far = i;
            }
        }
        if (far_d <= 0.0) break;  // fewer distinct points than k
        chosen.push_back(far);
        for (std::size_t i = 0; i < n; ++i) min_d[i] = std::min(min_d[i], sq_dist(points[i].h, points[far].h));
    }
    for (std::size_t idx : chosen) cl.centroids.push_back(points[idx].h);

    cl.assignment.assign(n, -1);
    std::vector<int> counts(cl.centroids.size());
    std::vector<std::vector<double>> sums(cl.centroids.size(), std::vector<double>(dim));
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int c = nearest_centroid(cl.centroids, points[i].h);
            inertia += sq_dist(cl.centroids[c], points[i].h);
            if (c != cl.assignment[i]) {
                cl.assignment[i] = c;
                changed = true;
            }
        }
        cl.inertia_history.push_back(inertia);
        if (!changed) break;
        for (auto& s : sums) std::fill(s.begin(), s.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            int c = cl.assignment[i];
            ++counts[c];
            for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[i].h[d];
        }
        for (std::size_t c = 0; c < cl.centroids.size(); ++c) {
            if (counts[c] == 0) continue;  // stale centroid may reacquire points
            for (std::size_t d = 0; d < dim; ++d)
                cl.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
    }

    // final assignment is a fixpoint of the current centroids; drop empties
    std::vector<int> live(cl.centroids.size(), 0);
    for (int a : cl.assignment) live[a] = 1;
    std::vector<int> remap(cl.centroids.size(), -1);
    std::vector<std::vector<double>> kept;
    for (std::size_t c = 0; c < cl.centroids.size(); ++c) {
        if (live[c]) {
            remap[c] = static_cast<int>(kept.size());
            kept.push_back(std::move(cl.centroids[c]));
        }
    }
    cl.centroids = std::move(kept);
    for (auto& a : cl.assignment) a = remap[a];
    return cl;
}

TransitionDiagram build_transition_diagram(const Clustering& clustering,
                                           const CollectedStates& collected,
                                           LabelSource label_source) {
    if (clustering.assignment.size() != collected.points.size())
        throw std::invalid_argument("build_transition_diagram: assignment does not cover the points");
    int m = clustering.live_count();

    TransitionDiagram out;
    out.counts.counts.resize(m);

    std::vector<double> vote_sum(m, 0.0);
    std::vector<int> vote_count(m, 0);

    for (std::size_t s = 0; s + 1 < collected.offsets.size(); ++s) {
        std::size_t begin = collected.offsets[s];
        std::size_t end = collected.offsets[s + 1];
        for (std::size_t i = begin; i + 1 < end; ++i) {
            int from = clustering.assignment[i];
            int to = clustering.assignment[i + 1];
            int sym = collected.points[i + 1].sym;
            out.counts.counts[from][sym][to] += 1;
        }
        int end_cluster = clustering.assignment[end - 1];
        double vote = label_source == LabelSource::AfterStop
                          ? collected.stop_points[s].response
                          : collected.points[end - 1].response;
        vote_sum[end_cluster] += vote;
        vote_count[end_cluster] += 1;
    }

    // clusters that never host an end-of-string point carry no stop-step
    // signal; their provisional label is the mean response of their members
    std::vector<double> member_sum(m, 0.0);
    std::vector<int> member_count(m, 0);
    for (std::size_t i = 0; i < collected.points.size(); ++i) {
        int c = clustering.assignment[i];
        member_sum[c] += collected.points[i].response;
        member_count[c] += 1;
    }

    Dfa dfa;
    dfa.state_count = m;
    dfa.start = clustering.assignment[collected.offsets[0]];
    dfa.accepting.assign(m, false);
    std::vector<int> unlabeled;  // clusters with no end-of-string evidence
    for (int c = 0; c < m; ++c) {
        if (vote_count[c] > 0) {
            dfa.accepting[c] = vote_sum[c] / vote_count[c] >= 0.5;
        } else {
            dfa.accepting[c] = member_count[c] > 0 && member_sum[c] / member_count[c] >= 0.5;
            unlabeled.push_back(c);
        }
    }
    dfa.delta.assign(m, {Dfa::kNoTransition, Dfa::kNoTransition});
    for (int c = 0; c < m; ++c) {
        for (int sym = 0; sym < 2; ++sym) {
            int best_target = Dfa::kNoTransition;
            int best_count = 0;
            for (const auto& [target, count] : out.counts.counts[c][sym]) {
                if (count > best_count) {  // map iterates ascending: ties keep lowest
                    best_count = count;
                    best_target = target;
                }
            }
            dfa.delta[c][sym] = best_target;
        }
    }

    // majority filtering can reroute a string's path so it ends in a cluster
    // that hosted no end-of-string point; such clusters inherit the majority
    // label of the strings ending there, keeping the machine consistent with
    // the data it was built from
    if (!unlabeled.empty()) {
        std::vector<int> pos_end(m, 0), neg_end(m, 0);
        for (std::size_t s = 0; s + 1 < collected.offsets.size(); ++s) {
            int state = dfa.start;
            for (std::size_t i = collected.offsets[s] + 1; i < collected.offsets[s + 1]; ++i) {
                if (state == Dfa::kNoTransition) break;
                state = dfa.delta[state][collected.points[i].sym];
            }
            if (state == Dfa::kNoTransition) continue;  // would fall into the dead sink
            (collected.labels[s] ? pos_end : neg_end)[state] += 1;
        }
        std::vector<int> free_clusters;
        for (int c : unlabeled) {
            if (pos_end[c] != neg_end[c]) {
                dfa.accepting[c] = pos_end[c] > neg_end[c];
            } else {
                free_clusters.push_back(c);
            }
        }

        // labels without any consequence for the data are resolved toward the
        // most mergeable machine: among all completions, keep the one whose
        // minimized automaton is smallest (provisional labels win ties)
        if (!free_clusters.empty() && free_clusters.size() <= 10) {
            int best_states = minimize(complete(dfa)).state_count;
            std::vector<bool> best_labels = dfa.accepting;
            for (std::uint32_t mask = 1; mask < (1u << free_clusters.size()); ++mask) {
                Dfa candidate = dfa;
                for (std::size_t b = 0; b < free_clusters.size(); ++b) {
                    if (mask & (1u << b)) {
                        candidate.accepting[free_clusters[b]] = !candidate.accepting[free_clusters[b]];
                    }
                }
                int states = minimize(complete(candidate)).state_count;
                if (states < best_states) {
                    best_states = states;
                    best_labels = candidate.accepting;
                }
            }
            dfa.accepting = std::move(best_labels);
        }
    }
    out.dfa = std::move(dfa);
    return out;
}

Dfa extract_dfa(const RnnModel& model, const LabeledDataset& dataset, int k,
                std::uint64_t seed, const std::vector<double>& h0,
                LabelSource label_source) {
    // oversampling duplicates would multiply transition counts; drop them
    std::vector<StringLabel> unique;
    std::unordered_set<std::string> seen;
    for (const auto& sl : dataset.train) {
        if (seen.insert(sl.s).second) unique.push_back(sl);
    }
    CollectedStates collected = collect_states(model, unique, h0);
    Clustering clustering = kmeans(collected.points, k, seed);
    TransitionDiagram diagram = build_transition_diagram(clustering, collected, label_source);
    return minimize(complete(diagram.dfa));
}

double evaluate_dfa(const Dfa& dfa, std::span<const StringLabel> split) {
    if (split.empty()) throw std::invalid_argument("evaluate_dfa: empty split");
    if (!dfa.is_complete()) throw std::invalid_argument("evaluate_dfa: automaton must be complete");
    std::size_t correct = 0;
    for (const auto& sl : split) {
        if (run(dfa, sl.s) == sl.positive) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(split.size());
}

}  // namespace rex
