#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rex/bigint.hpp"

namespace rex {

/// Per-class string counts at one length; counts must sum to 2^n.
struct ClassCounts {
    unsigned n = 0;
    std::vector<std::uint64_t> counts;
};

enum class GrammarClass { Polynomial, Exponential, Proportional };

std::string to_string(GrammarClass c);

/// Expected number of label changes between consecutive strings when all
/// 2^n strings are arranged at random: 2^n - (1/2^n) * sum_i m_i^2.
/// Two classes reduce to 2 * m_p * m_n / 2^n.
double expected_flips(const ClassCounts& counts);

/// Finite-length entropy H^N = (1/N) * log2 E[F], with the accepted-string
/// count taken exactly from the transfer-matrix recurrence. Throws when the
/// length window is single-class (E[F] = 0).
double entropy_at(int grammar, unsigned n);

/// Summed minimum substitution-only (Hamming) distances to the opposite
/// class, with class sizes; the building block for the averaged metric.
struct EditDistanceSums {
    std::uint64_t pos_sum = 0;  // sum over positives of distance to nearest negative
    std::uint64_t neg_sum = 0;
    std::size_t pos_count = 0;
    std::size_t neg_count = 0;
};
EditDistanceSums edit_distance_sums(int grammar, unsigned n);

/// Half of the class-averaged minimum Hamming distance between classes:
/// (1/2) * (pos_sum/|X_p| + neg_sum/|X_n|). Bit-packed scan; n <= 16.
/// Throws when either class is empty (e.g. grammar 5 at odd lengths).
double avg_edit_distance_at(int grammar, unsigned n);

/// Growth-class of the accepted-string count: the slope of log2 m_p against
/// N is fitted over even N in [64, 96] using exact counts; slope < 0.1 is
/// polynomial, slope > 0.95 proportional, exponential in between.
GrammarClass classify(int grammar);

/// Closed forms for the accepted-string count where one exists
/// (grammars 1, 2, 4, 5, 7); throws for grammars 3 and 6.
BigUint mp_closed_form(int grammar, unsigned n);

/// (1/N) * log2(r_p * neg_sum + (1 - r_p) * pos_sum) over the summed (not
/// averaged) distances; the finite-N form of the entropy/edit-distance
/// relation. Throws when either class is empty.
double prop2_quantity(int grammar, unsigned n);

/// Lexicographic membership bits for rings N = 1..max_n (max_n <= 12);
/// ring N holds 2^N cells starting at angle zero.
std::vector<std::vector<std::uint8_t>> ring_plot_data(int grammar, unsigned max_n);

struct ComplexityRow {
    unsigned n = 0;
    double entropy = 0.0;
    double avg_edit_distance = 0.0;
};

struct ComplexityReport {
    int grammar = 0;
    std::vector<ComplexityRow> rows;
    GrammarClass classification = GrammarClass::Polynomial;
};

ComplexityReport complexity_report(int grammar, const std::vector<unsigned>& lengths);

/// CSV with columns grammar,N,entropy,avg_edit_distance for all grammars at
/// the given lengths (the benchmark table layout).
std::string metrics_csv(const std::vector<unsigned>& lengths);

}  // namespace rex
