#include "doctest.h"

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rex/complexity.hpp"
#include "rex/dfa.hpp"
#include "rex/rng.hpp"

using namespace rex;

TEST_CASE("expected_flips: binary and degenerate cases") {
    CHECK(expected_flips({8, {128, 128}}) == doctest::Approx(128.0));
    CHECK(expected_flips({8, {0, 256}}) == doctest::Approx(0.0));
    CHECK(expected_flips({3, {2, 2, 4}}) == doctest::Approx(5.0));
}

TEST_CASE("expected_flips matches a shuffled-arrangement Monte Carlo estimate") {
    // average adjacent-label changes over random arrangements of the label
    // multiset (2, 2, 4) at N = 3
    rex::Rng rng(99);
    std::vector<int> labels{0, 0, 1, 1, 2, 2, 2, 2};
    double total = 0.0;
    const int trials = 200000;
    for (int t = 0; t < trials; ++t) {
        rng.shuffle(labels);
        for (std::size_t i = 0; i + 1 < labels.size(); ++i) total += labels[i] != labels[i + 1];
    }
    double estimate = total / trials;
    CHECK(expected_flips({3, {2, 2, 4}}) == doctest::Approx(estimate).epsilon(0.01));
    CHECK(std::abs(estimate - 5.0) < 0.05);
}

TEST_CASE("two-class formula reduces to 2 m_p m_n / 2^N on random counts") {
    rex::Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        unsigned n = 1 + static_cast<unsigned>(rng.next_below(20));
        std::uint64_t total = std::uint64_t{1} << n;
        std::uint64_t mp = rng.next_below(total + 1);
        double direct = 2.0 * static_cast<double>(mp) * static_cast<double>(total - mp)
                        / static_cast<double>(total);
        CHECK(expected_flips({n, {mp, total - mp}}) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("entropy examples and bounds") {
    CHECK(entropy_at(1, 8) == doctest::Approx(0.12).epsilon(0.05));
    CHECK(entropy_at(5, 10) == doctest::Approx(0.90).epsilon(1e-9));
    // balanced counts maximize entropy at (N-1)/N
    for (unsigned n : {8u, 10u, 12u}) {
        CHECK(entropy_at(5, n) == doctest::Approx((n - 1.0) / n).epsilon(1e-12));
        for (int g = 1; g <= 7; ++g) {
            double h = entropy_at(g, n);
            CHECK(h >= 0.0);
            CHECK(h <= (n - 1.0) / n + 1e-12);
        }
    }
    CHECK_THROWS_WITH_AS(entropy_at(5, 7), doctest::Contains("degenerate"), std::runtime_error);
}

TEST_CASE("entropy agrees with direct enumeration counts") {
    for (int g = 1; g <= 7; ++g) {
        for (unsigned n : {8u, 10u, 12u}) {
            std::uint64_t mp = oracle::brute_count(g, n);
            std::uint64_t total = std::uint64_t{1} << n;
            if (mp == 0 || mp == total) continue;
            double ef = 2.0 * static_cast<double>(mp) * static_cast<double>(total - mp)
                        / static_cast<double>(total);
            CHECK(entropy_at(g, n) == doctest::Approx(std::log2(ef) / n).epsilon(1e-12));
        }
    }
}

TEST_CASE("edit distance spot values from the benchmark table") {
    CHECK(avg_edit_distance_at(1, 8) == doctest::Approx(2.51).epsilon(0.002));
    CHECK(avg_edit_distance_at(5, 8) == doctest::Approx(1.00).epsilon(1e-12));
    CHECK(avg_edit_distance_at(7, 14) == doctest::Approx(1.75).epsilon(0.002));
}

TEST_CASE("edit distance equals the naive string scan for small lengths") {
    for (int g = 1; g <= 7; ++g) {
        for (unsigned n : {4u, 6u, 8u, 10u}) {
            if (g == 5 && n % 2 == 1) continue;
            CHECK(avg_edit_distance_at(g, n)
                  == doctest::Approx(oracle::naive_avg_edit_distance(g, n)).epsilon(1e-12));
        }
    }
}

TEST_CASE("grammar 5 at even lengths sits exactly at distance one") {
    for (unsigned n : {4u, 6u, 8u, 10u, 12u, 14u}) {
        CHECK(avg_edit_distance_at(5, n) == 1.0);
    }
    CHECK_THROWS_AS(avg_edit_distance_at(5, 9), std::runtime_error);
    CHECK_THROWS_AS(avg_edit_distance_at(4, 17), std::invalid_argument);  // brute-force bound
}

TEST_CASE("benchmark-table trends hold") {
    // entropy decreasing in N for grammars 1, 2, 7; non-decreasing for 4, 5, 6
    std::vector<unsigned> ns{8, 10, 12, 14};
    for (int g : {1, 2, 7}) {
        for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
            CHECK(entropy_at(g, ns[i + 1]) < entropy_at(g, ns[i]));
        }
    }
    for (int g : {4, 5, 6}) {
        for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
            CHECK(entropy_at(g, ns[i + 1]) >= entropy_at(g, ns[i]) - 1e-12);
        }
    }
}

TEST_CASE("classification of all seven grammars") {
    CHECK(classify(1) == GrammarClass::Polynomial);
    CHECK(classify(2) == GrammarClass::Polynomial);
    CHECK(classify(7) == GrammarClass::Polynomial);
    CHECK(classify(3) == GrammarClass::Exponential);
    CHECK(classify(4) == GrammarClass::Exponential);
    CHECK(classify(5) == GrammarClass::Proportional);
    CHECK(classify(6) == GrammarClass::Proportional);
}

TEST_CASE("closed forms match transfer-matrix counts and enumeration") {
    for (int g : {1, 2, 4, 5, 7}) {
        Dfa d = complete(tomita_dfa(g));
        for (unsigned n = 0; n <= 16; ++n) {
            CHECK(mp_closed_form(g, n) == count_accepted(d, n));
            if (n <= 14) CHECK(mp_closed_form(g, n).as_u64() == oracle::brute_count(g, n));
        }
    }
    CHECK(mp_closed_form(7, 8).as_u64() == 93);
    CHECK(mp_closed_form(4, 8).as_u64() == 149);
    CHECK(mp_closed_form(5, 7).as_u64() == 0);
    CHECK_THROWS_AS(mp_closed_form(3, 8), std::invalid_argument);
    CHECK_THROWS_AS(mp_closed_form(6, 8), std::invalid_argument);
}

TEST_CASE("relation quantity: grammar 5 equality and grammar 1 closed form") {
    for (unsigned n : {8u, 10u, 12u, 14u}) {
        CHECK(std::abs(prop2_quantity(5, n) - entropy_at(5, n)) <= 1e-12);
    }
    std::vector<double> g1_values;
    for (unsigned n : {8u, 10u, 12u, 14u}) {
        double expected = std::log2(n / 2.0 + 1.0 - std::ldexp(1.0, -static_cast<int>(n))) / n;
        double got = prop2_quantity(1, n);
        CHECK(got == doctest::Approx(expected).epsilon(1e-12));
        g1_values.push_back(got);
    }
    CHECK(std::is_sorted(g1_values.rbegin(), g1_values.rend()));
    for (std::size_t i = 0; i + 1 < g1_values.size(); ++i) CHECK(g1_values[i + 1] < g1_values[i]);
    CHECK_THROWS_AS(prop2_quantity(5, 9), std::runtime_error);
}

TEST_CASE("ring plot data") {
    auto g1_rings = ring_plot_data(1, 8);
    REQUIRE(g1_rings.size() == 8);
    for (unsigned n = 1; n <= 8; ++n) {
        const auto& ring = g1_rings[n - 1];
        REQUIRE(ring.size() == (std::size_t{1} << n));
        std::size_t positives = 0;
        for (auto b : ring) positives += b;
        CHECK(positives == 1);                  // 1* has one positive per ring
        CHECK(ring.back() == 1);                // the all-ones string is last
    }
    auto g5_rings = ring_plot_data(5, 3);
    for (auto b : g5_rings[2]) CHECK(b == 0);   // odd ring: all negative
    auto g2_rings = ring_plot_data(2, 2);
    REQUIRE(g2_rings[1].size() == 4);
    CHECK(g2_rings[1] == std::vector<std::uint8_t>{0, 0, 1, 0});  // only "10"
    CHECK_THROWS_AS(ring_plot_data(1, 13), std::invalid_argument);
}

TEST_CASE("metrics csv layout") {
    std::string csv = metrics_csv({8});
    CHECK(csv.rfind("grammar,N,entropy,avg_edit_distance\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);  // header + 7 grammars
    CHECK(csv == metrics_csv({8}));
}
