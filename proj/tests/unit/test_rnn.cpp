#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "rex/dataset.hpp"
#include "rex/rnn.hpp"
#include "rex/rng.hpp"

using namespace rex;

namespace {

const Arch kAllArchs[] = {Arch::Elman, Arch::SecondOrder, Arch::MiRnn, Arch::Lstm, Arch::Gru};

double sample_loss(const RnnModel& model, const EncodedSequence& seq, int label,
                   const std::vector<double>& h0) {
    StateTrace tr = forward(model, seq, h0);
    return loss(response01(model, tr.response_raw()), label);
}

/// Central finite differences over every scalar parameter.
double max_fd_relative_error(RnnModel& model, const EncodedSequence& seq, int label,
                             const std::vector<double>& h0) {
    const double step = 1e-5;
    Gradients analytic = grad_bptt(model, seq, label, h0);
    double worst = 0.0;
    for (std::size_t t = 0; t < model.tensors.size(); ++t) {
        for (std::size_t i = 0; i < model.tensors[t].v.size(); ++i) {
            double saved = model.tensors[t].v[i];
            model.tensors[t].v[i] = saved + step;
            double up = sample_loss(model, seq, label, h0);
            model.tensors[t].v[i] = saved - step;
            double down = sample_loss(model, seq, label, h0);
            model.tensors[t].v[i] = saved;
            double fd = (up - down) / (2.0 * step);
            double denom = std::max({std::abs(fd), std::abs(analytic[t][i]), 1e-6});
            worst = std::max(worst, std::abs(fd - analytic[t][i]) / denom);
        }
    }
    return worst;
}

EncodedSequence random_sequence(Rng& rng, std::size_t max_len) {
    std::string s;
    std::size_t len = 1 + rng.next_below(max_len);
    for (std::size_t i = 0; i < len; ++i) s += (rng.next_u64() & 1) ? '1' : '0';
    return encode(s);
}

}  // namespace

TEST_CASE("param_count follows the architecture formulas") {
    ModelConfig c;
    c.input = 3;
    c.arch = Arch::Elman;
    c.hidden = 33;
    CHECK(param_count(c) == 1221);  // H^2 + H*I + H
    c.arch = Arch::SecondOrder;
    c.hidden = 20;
    CHECK(param_count(c) == 1200);  // H^2 * I
    c.arch = Arch::Lstm;
    c.hidden = 16;
    CHECK(param_count(c) == 1216);  // 4 (H^2 + H*I)
    c.arch = Arch::Gru;
    c.hidden = 19;
    CHECK(param_count(c) == 3 * (19 * 19 + 19 * 3));
    c.arch = Arch::MiRnn;
    c.hidden = 32;
    CHECK(param_count(c) == 32 * 32 + 32 * 3 + 4 * 32);
}

TEST_CASE("budget_hidden_size picks the closest parameter count") {
    CHECK(budget_hidden_size(Arch::SecondOrder, 1220, 3) == 20);
    CHECK(budget_hidden_size(Arch::SecondOrder, 30100, 3) == 100);
    CHECK(budget_hidden_size(Arch::Elman, 1220, 3) == 33);
    CHECK(budget_hidden_size(Arch::Lstm, 1220, 3) == 16);
}

TEST_CASE("every grammar/architecture budget lands within five percent") {
    for (int g = 1; g <= 7; ++g) {
        int target = table1_param_budget(g);
        for (Arch a : kAllArchs) {
            ModelConfig c;
            c.arch = a;
            c.input = 3;
            c.hidden = budget_hidden_size(a, target, 3);
            double err = std::abs(param_count(c) - target) / static_cast<double>(target);
            CAPTURE(g);
            CAPTURE(to_string(a));
            CHECK(err <= 0.05);
        }
    }
}

TEST_CASE("init_model is seeded and bounded") {
    ModelConfig c;
    c.arch = Arch::Gru;
    c.hidden = 6;
    c.seed = 21;
    RnnModel a = init_model(c);
    RnnModel b = init_model(c);
    c.seed = 22;
    RnnModel d = init_model(c);
    bool all_equal = true, any_diff = false;
    for (std::size_t t = 0; t < a.tensors.size(); ++t) {
        for (std::size_t i = 0; i < a.tensors[t].v.size(); ++i) {
            CHECK(std::abs(a.tensors[t].v[i]) <= 0.1);
            all_equal &= a.tensors[t].v[i] == b.tensors[t].v[i];
            any_diff |= a.tensors[t].v[i] != d.tensors[t].v[i];
        }
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("tensor shapes follow the architecture table") {
    ModelConfig c;
    c.hidden = 5;
    c.input = 3;
    c.arch = Arch::SecondOrder;
    RnnModel so = init_model(c);
    REQUIRE(so.tensors.size() == 1);
    CHECK(so.tensors[0].shape == std::vector<int>{5, 5, 3});
    c.arch = Arch::MiRnn;
    RnnModel mi = init_model(c);
    REQUIRE(mi.tensors.size() == 6);
    CHECK(mi.tensors[0].shape == std::vector<int>{5, 3});   // U
    CHECK(mi.tensors[1].shape == std::vector<int>{5, 5});   // W
    CHECK(mi.tensors[2].shape == std::vector<int>{5});      // alpha
    c.arch = Arch::Lstm;
    CHECK(init_model(c).tensors.size() == 8);
    c.arch = Arch::Gru;
    CHECK(init_model(c).tensors.size() == 6);
    c.hidden = 1;
    CHECK_THROWS_AS(init_model(c), std::invalid_argument);
}

TEST_CASE("forward with zero weights hits the activation fixed point") {
    ModelConfig c;
    c.arch = Arch::Elman;
    c.activation = Activation::Sigmoid;
    c.hidden = 4;
    RnnModel m = init_model(c);
    for (auto& t : m.tensors) std::fill(t.v.begin(), t.v.end(), 0.0);
    StateTrace tr = forward(m, encode("0110"), std::vector<double>(4, 0.25));
    REQUIRE(tr.hidden.size() == 6);  // sequence length 5 (incl. stop) + initial
    for (std::size_t t = 1; t < tr.hidden.size(); ++t) {
        for (double v : tr.hidden[t]) CHECK(v == doctest::Approx(0.5));
    }

    c.arch = Arch::SecondOrder;
    c.activation = Activation::Tanh;
    RnnModel so = init_model(c);
    for (auto& t : so.tensors) std::fill(t.v.begin(), t.v.end(), 0.0);
    StateTrace tr2 = forward(so, encode("1"), std::vector<double>(4, 0.5));
    for (double v : tr2.hidden.back()) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("trace length contract holds for every architecture") {
    for (Arch a : kAllArchs) {
        ModelConfig c;
        c.arch = a;
        c.hidden = 5;
        c.seed = 3;
        RnnModel m = init_model(c);
        std::vector<double> h0 = make_h0(m.config, 17);
        EncodedSequence seq = encode("10011");
        StateTrace tr = forward(m, seq, h0);
        CHECK(tr.hidden.size() == seq.size() + 1);
        if (a == Arch::Lstm) CHECK(tr.cell.size() == seq.size() + 1);
        CHECK_THROWS_AS(forward(m, seq, std::vector<double>(4, 0.0)), std::invalid_argument);
    }
}

TEST_CASE("activation ranges bound the traces") {
    Rng rng(31);
    for (Arch a : kAllArchs) {
        for (Activation act : {Activation::Sigmoid, Activation::Tanh}) {
            ModelConfig c;
            c.arch = a;
            c.activation = act;
            c.hidden = 6;
            c.seed = rng.next_u64();
            RnnModel m = init_model(c);
            std::vector<double> h0 = make_h0(m.config, rng.next_u64());
            StateTrace tr = forward(m, random_sequence(rng, 8), h0);
            bool sigmoid_range = response_is_sigmoid(m.config);
            for (std::size_t t = 1; t < tr.hidden.size(); ++t) {
                for (double v : tr.hidden[t]) {
                    if (sigmoid_range) {
                        CHECK(v > 0.0);
                        CHECK(v < 1.0);
                    } else {
                        CHECK(v > -1.0);
                        CHECK(v < 1.0);
                    }
                }
            }
        }
    }
}

TEST_CASE("loss values") {
    CHECK(loss(0.5, 1) == doctest::Approx(0.125));
    CHECK(loss(1.0, 1) == doctest::Approx(0.0));
    CHECK(loss(0.0, 1) == doctest::Approx(0.5));
    CHECK(loss(0.25, 0) == doctest::Approx(0.03125));
}

TEST_CASE("gradients vanish on a perfect prediction") {
    // zero weights, sigmoid response is exactly 0.5; pick the label the map
    // cannot reach and then force the perfect case via label arithmetic:
    // with response 0.5 and "label" 0.5 unavailable, instead check the
    // zero-gradient contract on an exactly-matched response by construction
    ModelConfig c;
    c.arch = Arch::Elman;
    c.activation = Activation::Sigmoid;
    c.hidden = 3;
    c.seed = 8;
    RnnModel m = init_model(c);
    // drive response to label 1 by saturating the response neuron's bias
    m.tensors[2].v[0] = 60.0;
    double l = 0.0;
    Gradients g = grad_bptt(m, encode("101"), 1, std::vector<double>(3, 0.5), &l);
    CHECK(l < 1e-12);
    for (const auto& tensor_grad : g) {
        for (double v : tensor_grad) CHECK(std::abs(v) < 1e-10);
    }
}

TEST_CASE("bptt agrees with central finite differences on every architecture") {
    Rng rng(404);
    for (Arch a : kAllArchs) {
        for (Activation act : {Activation::Sigmoid, Activation::Tanh}) {
            if (act == Activation::Tanh
                && (a == Arch::MiRnn || a == Arch::Lstm || a == Arch::Gru)) {
                continue;  // fixed activations; sigmoid pass covers them once
            }
            ModelConfig c;
            c.arch = a;
            c.activation = act;
            c.hidden = 6;
            c.seed = rng.next_u64();
            RnnModel m = init_model(c);
            std::vector<double> h0 = make_h0(m.config, rng.next_u64());
            EncodedSequence seq = random_sequence(rng, 5);
            int label = static_cast<int>(rng.next_u64() & 1);
            double err = max_fd_relative_error(m, seq, label, h0);
            CAPTURE(to_string(a));
            CAPTURE(to_string(act));
            CHECK(err < 1e-4);
        }
    }
}

TEST_CASE("unused input columns receive zero gradient") {
    // sequence "00" never activates input column 1
    ModelConfig c;
    c.arch = Arch::Lstm;
    c.hidden = 4;
    c.seed = 12;
    RnnModel m = init_model(c);
    Gradients g = grad_bptt(m, encode("00"), 1, make_h0(m.config, 1));
    for (int gate = 0; gate < 4; ++gate) {  // U_* tensors are H x 3
        for (int i = 0; i < 4; ++i) {
            CHECK(g[gate][static_cast<std::size_t>(i) * 3 + 1] == 0.0);
        }
    }
}

TEST_CASE("rmsprop step behavior") {
    std::vector<double> w{1.0, 2.0}, g{0.0, 0.5}, v{0.0, 0.0};
    rmsprop_step(w, g, v, 0.1);
    CHECK(w[0] == 1.0);  // zero gradient leaves the weight alone
    // first step moves by about lr * sign(g) / sqrt(1 - decay)
    double expected = 2.0 - 0.1 * 0.5 / (std::sqrt(0.1 * 0.25) + 1e-8);
    CHECK(w[1] == doctest::Approx(expected).epsilon(1e-9));
    std::vector<double> bad{1.0};
    CHECK_THROWS_AS(rmsprop_step(w, bad, v, 0.1), std::invalid_argument);

    std::vector<double> w2{1.0, 2.0}, v2{0.0, 0.0};
    rmsprop_step(w2, g, v2, 0.1);
    CHECK(w2[1] == w[1]);  // deterministic given identical state
}

TEST_CASE("training a single sample converges monotonically below tolerance") {
    ModelConfig c;
    c.arch = Arch::SecondOrder;
    c.activation = Activation::Sigmoid;
    c.hidden = 4;
    c.seed = 5;
    RnnModel m = init_model(c);
    LabeledDataset ds;
    ds.train = {{"101", true}};
    TrainConfig tc;
    tc.max_epochs = 4000;
    std::vector<double> h0 = make_h0(m.config, 5);
    TrainResult r = train(m, ds, tc, h0);
    CHECK(r.converged);
    CHECK(r.history.back().mean_loss < 1e-3);
    for (std::size_t e = 0; e + 1 < r.history.size(); ++e) {
        CHECK(r.history[e + 1].mean_loss <= r.history[e].mean_loss + 1e-9);
    }
}

TEST_CASE("training is reproducible end to end") {
    DatasetConfig dc = table1_dataset_config(1);
    dc.seed = 33;
    dc.max_strings = 60;
    dc.train_fraction = 0.5;
    LabeledDataset ds = build_dataset(dc);
    TrainConfig tc;
    tc.max_epochs = 30;
    auto run_once = [&] {
        ModelConfig c;
        c.arch = Arch::SecondOrder;
        c.activation = Activation::Sigmoid;
        c.hidden = 6;
        c.seed = 77;
        RnnModel m = init_model(c);
        std::vector<double> h0 = make_h0(m.config, 77);
        train(m, ds, tc, h0);
        return m;
    };
    RnnModel a = run_once();
    RnnModel b = run_once();
    for (std::size_t t = 0; t < a.tensors.size(); ++t) {
        CHECK(a.tensors[t].v == b.tensors[t].v);
    }
}

TEST_CASE("accuracy thresholds at one half, ties counted positive") {
    ModelConfig c;
    c.arch = Arch::Elman;
    c.activation = Activation::Sigmoid;
    c.hidden = 3;
    c.seed = 2;
    RnnModel m = init_model(c);
    for (auto& t : m.tensors) std::fill(t.v.begin(), t.v.end(), 0.0);  // constant response 0.5
    std::vector<StringLabel> split{{"0", true}, {"1", false}, {"01", true}};
    std::vector<double> h0(3, 0.5);
    CHECK(accuracy(m, split, h0) == doctest::Approx(2.0 / 3.0));  // all classified positive
    CHECK_THROWS_AS(accuracy(m, std::span<const StringLabel>{}, h0), std::invalid_argument);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    namespace fs = std::filesystem;
    ModelConfig c;
    c.arch = Arch::MiRnn;
    c.hidden = 5;
    c.seed = 9;
    RnnModel m = init_model(c);
    std::vector<double> h0 = make_h0(m.config, 9);
    fs::path path = fs::temp_directory_path() / "rex_ckpt_test.bin";
    save_checkpoint(m, h0, path.string());
    auto [back, h0_back] = load_checkpoint(path.string());
    CHECK(back.config.arch == m.config.arch);
    CHECK(back.config.hidden == m.config.hidden);
    CHECK(h0_back == h0);
    for (std::size_t t = 0; t < m.tensors.size(); ++t) {
        CHECK(back.tensors[t].v == m.tensors[t].v);
        CHECK(back.tensors[t].shape == m.tensors[t].shape);
    }
    fs::remove(path);
}
