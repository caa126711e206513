#include <benchmark/benchmark.h>

#include "rex/complexity.hpp"
#include "rex/dataset.hpp"
#include "rex/dfa.hpp"
#include "rex/extraction.hpp"
#include "rex/rnn.hpp"

namespace {

void BM_CountAccepted(benchmark::State& state) {
    rex::Dfa g3 = rex::complete(rex::tomita_dfa(3));
    unsigned n = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        auto count = rex::count_accepted(g3, n);
        benchmark::DoNotOptimize(count);
    }
}
BENCHMARK(BM_CountAccepted)->Arg(16)->Arg(64)->Arg(256);

void BM_EntropyTable(benchmark::State& state) {
    for (auto _ : state) {
        double acc = 0.0;
        for (int g = 1; g <= 7; ++g) {
            for (unsigned n : {8u, 10u, 12u, 14u}) acc += rex::entropy_at(g, n);
        }
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_EntropyTable);

void BM_EditDistance(benchmark::State& state) {
    unsigned n = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        double d = rex::avg_edit_distance_at(7, n);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_EditDistance)->Arg(10)->Arg(12)->Arg(14);

void BM_ForwardBackward(benchmark::State& state) {
    rex::ModelConfig c;
    c.arch = static_cast<rex::Arch>(state.range(0));
    c.hidden = 20;
    c.seed = 5;
    rex::RnnModel model = rex::init_model(c);
    std::vector<double> h0 = rex::make_h0(model.config, 5);
    rex::EncodedSequence seq = rex::encode("0110100101");
    for (auto _ : state) {
        rex::Gradients g = rex::grad_bptt(model, seq, 1, h0);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_ForwardBackward)->Arg(0)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

void BM_KmeansExtraction(benchmark::State& state) {
    rex::DatasetConfig dc = rex::table1_dataset_config(2);
    dc.seed = 3;
    dc.max_strings = 200;
    dc.train_fraction = 0.5;
    rex::LabeledDataset ds = rex::build_dataset(dc);
    rex::ModelConfig c;
    c.arch = rex::Arch::SecondOrder;
    c.hidden = 20;
    c.seed = 8;
    rex::RnnModel model = rex::init_model(c);
    std::vector<double> h0 = rex::make_h0(model.config, 8);
    int k = static_cast<int>(state.range(0));
    for (auto _ : state) {
        rex::Dfa d = rex::extract_dfa(model, ds, k, 17, h0);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_KmeansExtraction)->Arg(3)->Arg(9)->Arg(15);

}  // namespace

BENCHMARK_MAIN();
