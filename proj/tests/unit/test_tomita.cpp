#include "doctest.h"

#include <stdexcept>

#include "oracles.hpp"
#include "rex/dfa.hpp"

using namespace rex;

TEST_CASE("ground-truth automata agree with the grammar predicates up to length 14") {
    for (int g = 1; g <= 7; ++g) {
        Dfa d = tomita_dfa(g);
        CAPTURE(g);
        for (unsigned n = 0; n <= 14; ++n) {
            for (std::uint32_t x = 0; x < (std::uint64_t{1} << n); ++x) {
                std::string s = oracle::bits_to_string(x, n);
                if (run(d, s) != oracle::predicate(g, s)) {
                    CAPTURE(s);
                    REQUIRE(run(d, s) == oracle::predicate(g, s));
                }
            }
        }
    }
}

TEST_CASE("hand-encoded automata are already complete and minimal") {
    for (int g = 1; g <= 7; ++g) {
        Dfa d = tomita_dfa(g);
        CHECK(d.is_complete());
        CHECK(minimize(d).state_count == d.state_count);
    }
}

TEST_CASE("canonical state counts") {
    // snapshot taken on first build; grammar 1 has two states, the rest
    // have between three and six
    const int expected[8] = {0, 2, 3, 5, 4, 4, 3, 5};
    for (int g = 1; g <= 7; ++g) {
        CHECK(tomita_dfa(g).state_count == expected[g]);
        if (g != 1) {
            CHECK(tomita_dfa(g).state_count >= 3);
            CHECK(tomita_dfa(g).state_count <= 6);
        }
    }
}

TEST_CASE("grammar 5 accepts exactly half of the even-length strings") {
    std::uint64_t positives = 0;
    for (std::uint32_t x = 0; x < 256; ++x) {
        if (run(tomita_dfa(5), oracle::bits_to_string(x, 8))) ++positives;
    }
    CHECK(positives == 128);
}

TEST_CASE("membership spot checks from the grammar descriptions") {
    CHECK(run(tomita_dfa(1), "1111"));
    CHECK_FALSE(run(tomita_dfa(1), "1101"));
    CHECK(run(tomita_dfa(2), "101010"));
    CHECK_FALSE(run(tomita_dfa(2), "1010101"));
    CHECK(run(tomita_dfa(3), "100"));   // odd 1-run, even 0-run
    CHECK_FALSE(run(tomita_dfa(3), "10"));
    CHECK(run(tomita_dfa(4), "0110011"));
    CHECK_FALSE(run(tomita_dfa(4), "10001"));
    CHECK(run(tomita_dfa(5), "0110"));
    CHECK_FALSE(run(tomita_dfa(5), "110"));
    CHECK(run(tomita_dfa(6), "01"));    // 1 - 1 = 0
    CHECK_FALSE(run(tomita_dfa(6), "011"));
    CHECK(run(tomita_dfa(7), "001100"));
    CHECK_FALSE(run(tomita_dfa(7), "01010"));
}

TEST_CASE("index range is enforced") {
    CHECK_THROWS_AS(tomita_dfa(0), std::invalid_argument);
    CHECK_THROWS_AS(tomita_dfa(8), std::invalid_argument);
}
