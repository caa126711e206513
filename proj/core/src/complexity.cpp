#include "rex/complexity.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rex/dfa.hpp"

namespace rex {

std::string to_string(GrammarClass c) {
    switch (c) {
        case GrammarClass::Polynomial: return "polynomial";
        case GrammarClass::Exponential: return "exponential";
        case GrammarClass::Proportional: return "proportional";
    }
    return "?";
}

double expected_flips(const ClassCounts& counts) {
    if (counts.n >= 63) throw std::invalid_argument("expected_flips: length too large");
    unsigned __int128 total = 0;
    unsigned __int128 sq = 0;
    for (std::uint64_t m : counts.counts) {
        total += m;
        sq += static_cast<unsigned __int128>(m) * m;
    }
    unsigned __int128 expected_total = static_cast<unsigned __int128>(1) << counts.n;
    if (total != expected_total) throw std::invalid_argument("expected_flips: counts do not sum to 2^n");
    long double pow2n = std::ldexp(1.0L, static_cast<int>(counts.n));
    return static_cast<double>(pow2n - static_cast<long double>(sq) / pow2n);
}

double entropy_at(int grammar, unsigned n) {
    if (n < 1) throw std::invalid_argument("entropy_at: length must be at least 1");
    BigUint m_p = count_accepted(tomita_dfa(grammar), n);
    BigUint m_n = BigUint::pow2(n) - m_p;
    if (m_p.is_zero() || m_n.is_zero())
        throw std::runtime_error("entropy_at: degenerate distribution (single class)");
    // log2 E[F] = log2(2 m_p m_n / 2^n) = 1 + log2(m_p m_n) - n, exact until the logarithm
    double log_ef = 1.0 + (m_p * m_n).log2() - static_cast<double>(n);
    return log_ef / static_cast<double>(n);
}

namespace {

/// Membership bits of all 2^n strings, indexed by the string read as a
/// big-endian integer (lexicographic position).
std::vector<std::uint8_t> membership_bits(const Dfa& g, unsigned n) {
    std::vector<std::uint8_t> bits(std::size_t{1} << n);
    for (std::uint32_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        int state = g.start;
        for (unsigned i = n; i-- > 0;) {
            state = g.delta[state][(x >> i) & 1u];
        }
        bits[x] = g.accepting[state] ? 1 : 0;
    }
    return bits;
}

std::uint64_t min_distance_sum(const std::vector<std::uint32_t>& from,
                               const std::vector<std::uint32_t>& to) {
    std::uint64_t sum = 0;
    for (std::uint32_t a : from) {
        unsigned best = 32;
        for (std::uint32_t b : to) {
            unsigned d = static_cast<unsigned>(std::popcount(a ^ b));
            if (d < best) {
                best = d;
                if (best == 1) break;  // 0 is impossible across classes
            }
        }
        sum += best;
    }
    return sum;
}

}  // namespace

EditDistanceSums edit_distance_sums(int grammar, unsigned n) {
    if (n < 1 || n > 16) throw std::invalid_argument("edit_distance_sums: length must be in 1..16");
    Dfa g = tomita_dfa(grammar);
    std::vector<std::uint8_t> bits = membership_bits(g, n);
    std::vector<std::uint32_t> pos, neg;
    for (std::uint32_t x = 0; x < bits.size(); ++x) {
        (bits[x] ? pos : neg).push_back(x);
    }
    if (pos.empty() || neg.empty())
        throw std::runtime_error("edit_distance_sums: one class is empty at this length");
    EditDistanceSums s;
    s.pos_count = pos.size();
    s.neg_count = neg.size();
    s.pos_sum = min_distance_sum(pos, neg);
    s.neg_sum = min_distance_sum(neg, pos);
    return s;
}

double avg_edit_distance_at(int grammar, unsigned n) {
    EditDistanceSums s = edit_distance_sums(grammar, n);
    double d = static_cast<double>(s.pos_sum) / static_cast<double>(s.pos_count)
               + static_cast<double>(s.neg_sum) / static_cast<double>(s.neg_count);
    return 0.5 * d;
}

GrammarClass classify(int grammar) {
    Dfa g = tomita_dfa(grammar);
    // even lengths only: grammars 2 and 5 accept nothing at odd lengths
    std::vector<double> xs, ys;
    for (unsigned n = 64; n <= 96; n += 2) {
        BigUint m_p = count_accepted(g, n);
        if (m_p.is_zero()) continue;
        xs.push_back(static_cast<double>(n));
        ys.push_back(m_p.log2());
    }
    if (xs.empty()) throw std::runtime_error("classify: no positive strings over the fit range");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    double slope = den > 0.0 ? num / den : 0.0;
    if (slope < 0.1) return GrammarClass::Polynomial;
    if (slope > 0.95) return GrammarClass::Proportional;
    return GrammarClass::Exponential;
}

BigUint mp_closed_form(int grammar, unsigned n) {
    switch (grammar) {
        case 1:
            return BigUint(1);
        case 2:
            return BigUint(n % 2 == 0 ? 1 : 0);
        case 4: {
            // tribonacci-style: a_k = a_{k-1} + a_{k-2} + a_{k-3}
            BigUint a0(1), a1(2), a2(4);
            if (n == 0) return a0;
            if (n == 1) return a1;
            if (n == 2) return a2;
            for (unsigned k = 3; k <= n; ++k) {
                BigUint next = a2 + a1 + a0;
                a0 = a1;
                a1 = a2;
                a2 = next;
            }
            return a2;
        }
        case 5:
            if (n % 2 != 0) return BigUint(0);
            return n == 0 ? BigUint(1) : BigUint::pow2(n - 1);
        case 7: {
            if (n == 0) return BigUint(1);
            // C(n-1,3) + 2 C(n-1,2) + 2 C(n-1,1) + 2
            std::uint64_t m = n - 1;
            BigUint c3 = BigUint(m >= 3 ? m * (m - 1) * (m - 2) / 6 : 0);
            BigUint c2 = BigUint(m >= 2 ? m * (m - 1) / 2 : 0);
            return c3 + c2 + c2 + BigUint(2 * m) + BigUint(2);
        }
        default:
            throw std::invalid_argument("mp_closed_form: no closed form for this grammar");
    }
}

double prop2_quantity(int grammar, unsigned n) {
    EditDistanceSums s = edit_distance_sums(grammar, n);
    double total = std::ldexp(1.0, static_cast<int>(n));
    double r_p = static_cast<double>(s.pos_count) / total;
    double mixed = r_p * static_cast<double>(s.neg_sum)
                   + (1.0 - r_p) * static_cast<double>(s.pos_sum);
    return std::log2(mixed) / static_cast<double>(n);
}

std::vector<std::vector<std::uint8_t>> ring_plot_data(int grammar, unsigned max_n) {
    if (max_n < 1 || max_n > 12) throw std::invalid_argument("ring_plot_data: max length must be in 1..12");
    Dfa g = tomita_dfa(grammar);
    std::vector<std::vector<std::uint8_t>> rings;
    rings.reserve(max_n);
    for (unsigned n = 1; n <= max_n; ++n) {
        rings.push_back(membership_bits(g, n));
    }
    return rings;
}

ComplexityReport complexity_report(int grammar, const std::vector<unsigned>& lengths) {
    ComplexityReport rep;
    rep.grammar = grammar;
    for (unsigned n : lengths) {
        rep.rows.push_back({n, entropy_at(grammar, n), avg_edit_distance_at(grammar, n)});
    }
    rep.classification = classify(grammar);
    return rep;
}

std::string metrics_csv(const std::vector<unsigned>& lengths) {
    std::ostringstream os;
    os << "grammar,N,entropy,avg_edit_distance\n";
    char buf[64];
    for (int g = 1; g <= 7; ++g) {
        for (unsigned n : lengths) {
            std::snprintf(buf, sizeof buf, "%d,%u,%.6f,%.6f", g, n,
                          entropy_at(g, n), avg_edit_distance_at(g, n));
            os << buf << "\n";
        }
    }
    return os.str();
}

}  // namespace rex
