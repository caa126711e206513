#include "doctest.h"

#include <stdexcept>

#include <map>
#include <set>

#include "oracles.hpp"
#include "rex/dataset.hpp"
#include "rex/dfa.hpp"

using namespace rex;

TEST_CASE("enumerate_labeled: lexicographic order and ground-truth labels") {
    auto g2_len2 = enumerate_labeled(2, 2);
    REQUIRE(g2_len2.size() == 4);
    CHECK(g2_len2[0].s == "00");
    CHECK(g2_len2[3].s == "11");
    int positives = 0;
    for (const auto& sl : g2_len2) {
        if (sl.positive) {
            ++positives;
            CHECK(sl.s == "10");
        }
    }
    CHECK(positives == 1);

    for (const auto& sl : enumerate_labeled(5, 7)) CHECK_FALSE(sl.positive);

    int g7_positives = 0;
    for (const auto& sl : enumerate_labeled(7, 8)) {
        if (sl.positive) ++g7_positives;
    }
    CHECK(g7_positives == 93);  // C(7,3) + 2 C(7,2) + 2*7 + 2
}

TEST_CASE("enumerate_labeled labels match the predicates") {
    for (int g = 1; g <= 7; ++g) {
        for (const auto& sl : enumerate_labeled(g, 6)) {
            CHECK(sl.positive == oracle::predicate(g, sl.s));
        }
    }
    CHECK_THROWS_AS(enumerate_labeled(1, 25), std::invalid_argument);
}

TEST_CASE("build_dataset: label soundness, bounds, disjoint splits") {
    for (int g : {1, 3, 5}) {
        DatasetConfig c = table1_dataset_config(g);
        c.seed = 5;
        c.max_strings = 400;
        LabeledDataset ds = build_dataset(c);
        Dfa truth = tomita_dfa(g);
        std::set<std::string> train_set, test_set;
        for (const auto& sl : ds.train) {
            CHECK(sl.positive == run(truth, sl.s));
            CHECK(sl.s.size() >= static_cast<std::size_t>(c.min_length));
            CHECK(sl.s.size() <= static_cast<std::size_t>(c.max_length));
            train_set.insert(sl.s);
        }
        for (const auto& sl : ds.test) {
            CHECK(sl.positive == run(truth, sl.s));
            CHECK(sl.s.size() >= static_cast<std::size_t>(c.min_length));
            CHECK(sl.s.size() <= static_cast<std::size_t>(c.max_length));
            CHECK(test_set.insert(sl.s).second);        // no duplicates in test
            CHECK(train_set.count(sl.s) == 0);          // no leakage
        }
    }
}

TEST_CASE("grammar 1 has at most one positive per length") {
    DatasetConfig c = table1_dataset_config(1);
    c.oversample_positives = false;
    c.seed = 3;
    LabeledDataset ds = build_dataset(c);
    std::set<std::string> train_pos;
    for (const auto& sl : ds.train) {
        if (sl.positive) train_pos.insert(sl.s);
    }
    CHECK(train_pos.size() <= 14);  // one string of 1s per length in [1,14]
}

TEST_CASE("oversampling balances the training split") {
    DatasetConfig c = table1_dataset_config(1);
    c.seed = 9;
    c.max_strings = 500;
    c.train_fraction = 0.5;
    LabeledDataset ds = build_dataset(c);
    std::size_t pos = 0;
    for (const auto& sl : ds.train) pos += sl.positive;
    double ratio = static_cast<double>(pos) / static_cast<double>(ds.train.size());
    CHECK(ratio >= 0.45);
    CHECK(ratio <= 0.55);
    // test split must stay untouched: no duplicates
    std::set<std::string> test_set;
    for (const auto& sl : ds.test) CHECK(test_set.insert(sl.s).second);
}

TEST_CASE("per-length positive coverage matches count_accepted on the full window") {
    DatasetConfig c;
    c.grammar = 4;
    c.min_length = 3;
    c.max_length = 8;
    c.train_fraction = 0.5;
    c.seed = 1;
    LabeledDataset ds = build_dataset(c);  // uncapped: the whole window
    std::map<std::size_t, std::uint64_t> per_length;
    for (const auto& sl : ds.train) {
        if (sl.positive) ++per_length[sl.s.size()];
    }
    for (const auto& sl : ds.test) {
        if (sl.positive) ++per_length[sl.s.size()];
    }
    Dfa truth = complete(tomita_dfa(4));
    for (int n = 3; n <= 8; ++n) {
        CHECK(per_length[n] == count_accepted(truth, n).as_u64());
    }
}

TEST_CASE("same seed gives identical datasets, different seeds differ") {
    DatasetConfig c = table1_dataset_config(3);
    c.seed = 77;
    c.max_strings = 300;
    LabeledDataset a = build_dataset(c);
    LabeledDataset b = build_dataset(c);
    CHECK(dataset_to_jsonl(a) == dataset_to_jsonl(b));
    c.seed = 78;
    LabeledDataset d = build_dataset(c);
    CHECK(dataset_to_jsonl(a) != dataset_to_jsonl(d));
}

TEST_CASE("a window without positives is rejected") {
    DatasetConfig c;
    c.grammar = 5;
    c.min_length = 3;
    c.max_length = 3;  // odd lengths have no even/even strings
    c.train_fraction = 0.5;
    CHECK_THROWS_WITH_AS(build_dataset(c), doctest::Contains("no positive"), std::runtime_error);
}

TEST_CASE("encode produces one-hot steps ending in the stop symbol") {
    EncodedSequence seq = encode("10");
    REQUIRE(seq.size() == 3);
    CHECK(seq.one_hot(0) == std::array<double, 3>{0, 1, 0});
    CHECK(seq.one_hot(1) == std::array<double, 3>{1, 0, 0});
    CHECK(seq.one_hot(2) == std::array<double, 3>{0, 0, 1});

    EncodedSequence zero = encode("0");
    REQUIRE(zero.size() == 2);
    CHECK(zero.one_hot(0) == std::array<double, 3>{1, 0, 0});
    CHECK(zero.one_hot(1) == std::array<double, 3>{0, 0, 1});

    CHECK_THROWS_AS(encode(""), std::invalid_argument);
}

TEST_CASE("dataset jsonl round trip") {
    DatasetConfig c = table1_dataset_config(6);
    c.seed = 4;
    c.max_strings = 120;
    LabeledDataset ds = build_dataset(c);
    LabeledDataset back = dataset_from_jsonl(dataset_to_jsonl(ds), c);
    REQUIRE(back.train.size() == ds.train.size());
    REQUIRE(back.test.size() == ds.test.size());
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
        CHECK(back.train[i].s == ds.train[i].s);
        CHECK(back.train[i].positive == ds.train[i].positive);
    }
    DatasetConfig rt = dataset_config_from_json(dataset_config_to_json(c));
    CHECK(rt.grammar == c.grammar);
    CHECK(rt.max_strings == c.max_strings);
    CHECK(rt.train_fraction == c.train_fraction);
}
