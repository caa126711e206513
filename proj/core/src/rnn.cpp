#include "rex/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "rex/rng.hpp"

namespace rex {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y := M x  (M is rows x cols, row-major)
void matvec(const Tensor& m, const std::vector<double>& x, std::vector<double>& y) {
    int rows = m.shape[0];
    int cols = m.shape[1];
    const double* a = m.v.data();
    for (int i = 0; i < rows; ++i) {
        double acc = 0.0;
        const double* row = a + static_cast<std::size_t>(i) * cols;
        for (int j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

// y := M^T x
void matvec_t(const Tensor& m, const std::vector<double>& x, std::vector<double>& y) {
    int rows = m.shape[0];
    int cols = m.shape[1];
    std::fill(y.begin(), y.end(), 0.0);
    const double* a = m.v.data();
    for (int i = 0; i < rows; ++i) {
        const double* row = a + static_cast<std::size_t>(i) * cols;
        double xi = x[i];
        for (int j = 0; j < cols; ++j) y[j] += row[j] * xi;
    }
}

// G += outer(d, h)  (G is |d| x |h|, row-major flat)
void add_outer(std::vector<double>& g, const std::vector<double>& d, const std::vector<double>& h) {
    std::size_t cols = h.size();
    for (std::size_t i = 0; i < d.size(); ++i) {
        double di = d[i];
        double* row = g.data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) row[j] += di * h[j];
    }
}

bool check_activation_fixed(Arch a) {
    return a == Arch::MiRnn || a == Arch::Lstm || a == Arch::Gru;
}

std::vector<std::pair<std::string, std::vector<int>>> tensor_plan(const ModelConfig& c) {
    int h = c.hidden, in = c.input;
    switch (c.arch) {
        case Arch::Elman:
            return {{"U", {h, in}}, {"W", {h, h}}, {"b", {h}}};
        case Arch::SecondOrder:
            return {{"W", {h, h, in}}};
        case Arch::MiRnn:
            return {{"U", {h, in}}, {"W", {h, h}},
                    {"alpha", {h}}, {"beta1", {h}}, {"beta2", {h}}, {"b", {h}}};
        case Arch::Lstm:
            return {{"U_i", {h, in}}, {"U_f", {h, in}}, {"U_o", {h, in}}, {"U_g", {h, in}},
                    {"W_i", {h, h}}, {"W_f", {h, h}}, {"W_o", {h, h}}, {"W_g", {h, h}}};
        case Arch::Gru:
            return {{"U_z", {h, in}}, {"U_r", {h, in}}, {"U_h", {h, in}},
                    {"W_z", {h, h}}, {"W_r", {h, h}}, {"W_h", {h, h}}};
    }
    throw std::invalid_argument("unknown architecture");
}

void validate_config(const ModelConfig& c) {
    if (c.hidden < 2)
        throw std::invalid_argument("ModelConfig: hidden size must be at least 2 (response neuron plus one)");
    if (c.input < 1) throw std::invalid_argument("ModelConfig: input size must be positive");
}

}  // namespace

std::string to_string(Arch a) {
    switch (a) {
        case Arch::Elman: return "elman";
        case Arch::SecondOrder: return "second_order";
        case Arch::MiRnn: return "mi_rnn";
        case Arch::Lstm: return "lstm";
        case Arch::Gru: return "gru";
    }
    return "?";
}

std::string to_string(Activation a) {
    return a == Activation::Sigmoid ? "sigmoid" : "tanh";
}

Arch arch_from_string(const std::string& s) {
    if (s == "elman") return Arch::Elman;
    if (s == "second_order" || s == "2nd" || s == "second") return Arch::SecondOrder;
    if (s == "mi_rnn" || s == "mirnn") return Arch::MiRnn;
    if (s == "lstm") return Arch::Lstm;
    if (s == "gru") return Arch::Gru;
    throw std::invalid_argument("unknown architecture: " + s);
}

Activation activation_from_string(const std::string& s) {
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "tanh") return Activation::Tanh;
    throw std::invalid_argument("unknown activation: " + s);
}

int param_count(const ModelConfig& config) {
    validate_config(config);
    int total = 0;
    for (const auto& [name, shape] : tensor_plan(config)) {
        int n = 1;
        for (int d : shape) n *= d;
        total += n;
    }
    return total;
}

int budget_hidden_size(Arch arch, int target_params, int input_size) {
    ModelConfig c;
    c.arch = arch;
    c.input = input_size;
    int best_h = 2;
    long long best_diff = -1;
    for (int h = 2;; ++h) {
        c.hidden = h;
        long long diff = std::llabs(static_cast<long long>(param_count(c)) - target_params);
        if (best_diff < 0 || diff < best_diff) {
            best_diff = diff;
            best_h = h;
        }
        if (param_count(c) > target_params && diff >= best_diff) break;
    }
    return best_h;
}

RnnModel init_model(const ModelConfig& config) {
    validate_config(config);
    RnnModel m;
    m.config = config;
    if (check_activation_fixed(config.arch)) m.config.activation = Activation::Tanh;
    Rng rng(mix_seed(config.seed, 0x1a17));
    for (const auto& [name, shape] : tensor_plan(m.config)) {
        Tensor t;
        t.name = name;
        t.shape = shape;
        int n = 1;
        for (int d : shape) n *= d;
        t.v.resize(n);
        for (auto& w : t.v) w = rng.uniform(-0.1, 0.1);
        m.tensors.push_back(std::move(t));
    }
    return m;
}

bool response_is_sigmoid(const ModelConfig& config) {
    return (config.arch == Arch::Elman || config.arch == Arch::SecondOrder)
           && config.activation == Activation::Sigmoid;
}

double response01(const RnnModel& model, double raw) {
    return response_is_sigmoid(model.config) ? raw : 0.5 * (raw + 1.0);
}

std::vector<double> make_h0(const ModelConfig& config, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x40));
    std::vector<double> h0(config.hidden);
    if (response_is_sigmoid(config)) {
        for (auto& x : h0) x = rng.uniform(0.0, 1.0);
    } else {
        for (auto& x : h0) x = rng.uniform(-1.0, 1.0);
    }
    return h0;
}

StateTrace forward(const RnnModel& model, const EncodedSequence& seq,
                   const std::vector<double>& h0) {
    const ModelConfig& c = model.config;
    int H = c.hidden;
    if (static_cast<int>(h0.size()) != H)
        throw std::invalid_argument("forward: h0 dimension mismatch");

    StateTrace tr;
    tr.symbols = seq.symbols;
    tr.hidden.reserve(seq.size() + 1);
    tr.hidden.push_back(h0);
    bool is_lstm = c.arch == Arch::Lstm;
    if (is_lstm) tr.cell.push_back(std::vector<double>(H, 0.0));

    auto act = [&](double x) {
        return c.activation == Activation::Sigmoid ? sigmoid(x) : std::tanh(x);
    };

    std::vector<double> next(H), tmp(H), tmp2(H);
    for (std::size_t t = 0; t < seq.size(); ++t) {
        int k = seq.symbols[t];
        if (k < 0 || k >= c.input) throw std::invalid_argument("forward: symbol outside input range");
        const std::vector<double>& h = tr.hidden.back();
        switch (c.arch) {
            case Arch::Elman: {
                const Tensor& U = model.tensors[0];
                const Tensor& W = model.tensors[1];
                const Tensor& b = model.tensors[2];
                matvec(W, h, tmp);
                for (int i = 0; i < H; ++i)
                    next[i] = act(U.v[static_cast<std::size_t>(i) * c.input + k] + tmp[i] + b.v[i]);
                break;
            }
            case Arch::SecondOrder: {
                const Tensor& W = model.tensors[0];
                for (int i = 0; i < H; ++i) {
                    const double* base = W.v.data() + (static_cast<std::size_t>(i) * H) * c.input + k;
                    double acc = 0.0;
                    for (int j = 0; j < H; ++j) acc += base[static_cast<std::size_t>(j) * c.input] * h[j];
                    next[i] = act(acc);
                }
                break;
            }
            case Arch::MiRnn: {
                const Tensor& U = model.tensors[0];
                const Tensor& W = model.tensors[1];
                const Tensor& al = model.tensors[2];
                const Tensor& b1 = model.tensors[3];
                const Tensor& b2 = model.tensors[4];
                const Tensor& b = model.tensors[5];
                matvec(W, h, tmp);  // w = W s
                for (int i = 0; i < H; ++i) {
                    double u = U.v[static_cast<std::size_t>(i) * c.input + k];
                    next[i] = std::tanh(al.v[i] * u * tmp[i] + b1.v[i] * tmp[i] + b2.v[i] * u + b.v[i]);
                }
                break;
            }
            case Arch::Lstm: {
                const std::vector<double>& cprev = tr.cell.back();
                std::vector<double> cnext(H);
                std::vector<double> gate(H);
                std::vector<double> acc(H);
                // gates share the pattern sigma/tanh(U[:,k] + W h)
                for (int gidx = 0; gidx < 4; ++gidx) {
                    const Tensor& U = model.tensors[gidx];
                    const Tensor& W = model.tensors[4 + gidx];
                    matvec(W, h, acc);
                    for (int i = 0; i < H; ++i) {
                        double pre = U.v[static_cast<std::size_t>(i) * c.input + k] + acc[i];
                        gate[i] = gidx == 3 ? std::tanh(pre) : sigmoid(pre);
                    }
                    if (gidx == 0) tmp = gate;        // i
                    else if (gidx == 1) tmp2 = gate;  // f
                    else if (gidx == 2) next = gate;  // o (reuse)
                    else {
                        for (int i = 0; i < H; ++i) cnext[i] = cprev[i] * tmp2[i] + gate[i] * tmp[i];
                    }
                }
                for (int i = 0; i < H; ++i) next[i] = std::tanh(cnext[i]) * next[i];
                tr.cell.push_back(std::move(cnext));
                break;
            }
            case Arch::Gru: {
                const Tensor& Uz = model.tensors[0];
                const Tensor& Ur = model.tensors[1];
                const Tensor& Uh = model.tensors[2];
                const Tensor& Wz = model.tensors[3];
                const Tensor& Wr = model.tensors[4];
                const Tensor& Wh = model.tensors[5];
                std::vector<double> z(H), r(H), hr(H);
                matvec(Wz, h, tmp);
                for (int i = 0; i < H; ++i)
                    z[i] = sigmoid(Uz.v[static_cast<std::size_t>(i) * c.input + k] + tmp[i]);
                matvec(Wr, h, tmp);
                for (int i = 0; i < H; ++i)
                    r[i] = sigmoid(Ur.v[static_cast<std::size_t>(i) * c.input + k] + tmp[i]);
                for (int i = 0; i < H; ++i) hr[i] = h[i] * r[i];
                matvec(Wh, hr, tmp);
                for (int i = 0; i < H; ++i) {
                    double hh = std::tanh(Uh.v[static_cast<std::size_t>(i) * c.input + k] + tmp[i]);
                    next[i] = (1.0 - z[i]) * hh + z[i] * h[i];
                }
                break;
            }
        }
        tr.hidden.push_back(next);
    }
    return tr;
}

double loss(double response, int label) {
    double d = static_cast<double>(label) - response;
    return 0.5 * d * d;
}

namespace {

struct StepCache {
    int sym = 0;
    // per-architecture intermediates, indexed by role
    std::vector<std::vector<double>> vecs;
};

}  // namespace

Gradients grad_bptt(const RnnModel& model, const EncodedSequence& seq, int label,
                    const std::vector<double>& h0, double* loss_out) {
    const ModelConfig& c = model.config;
    int H = c.hidden;
    int I = c.input;
    if (static_cast<int>(h0.size()) != H)
        throw std::invalid_argument("grad_bptt: h0 dimension mismatch");

    // forward with caches
    std::size_t T = seq.size();
    std::vector<std::vector<double>> hs(T + 1);
    hs[0] = h0;
    std::vector<std::vector<double>> cs;  // lstm cells
    std::vector<StepCache> caches(T);

    auto act = [&](double x) {
        return c.activation == Activation::Sigmoid ? sigmoid(x) : std::tanh(x);
    };

    if (c.arch == Arch::Lstm) {
        cs.resize(T + 1);
        cs[0].assign(H, 0.0);
    }

    std::vector<double> acc(H);
    for (std::size_t t = 0; t < T; ++t) {
        int k = seq.symbols[t];
        caches[t].sym = k;
        const std::vector<double>& h = hs[t];
        switch (c.arch) {
            case Arch::Elman: {
                matvec(model.tensors[1], h, acc);
                std::vector<double> out(H);
                for (int i = 0; i < H; ++i)
                    out[i] = act(model.tensors[0].v[static_cast<std::size_t>(i) * I + k] + acc[i]
                                 + model.tensors[2].v[i]);
                hs[t + 1] = std::move(out);
                break;
            }
            case Arch::SecondOrder: {
                const Tensor& W = model.tensors[0];
                std::vector<double> out(H);
                for (int i = 0; i < H; ++i) {
                    const double* base = W.v.data() + (static_cast<std::size_t>(i) * H) * I + k;
                    double s = 0.0;
                    for (int j = 0; j < H; ++j) s += base[static_cast<std::size_t>(j) * I] * h[j];
                    out[i] = act(s);
                }
                hs[t + 1] = std::move(out);
                break;
            }
            case Arch::MiRnn: {
                std::vector<double> u(H), w(H), out(H);
                const Tensor& U = model.tensors[0];
                matvec(model.tensors[1], h, w);
                for (int i = 0; i < H; ++i) u[i] = U.v[static_cast<std::size_t>(i) * I + k];
                const Tensor& al = model.tensors[2];
                const Tensor& b1 = model.tensors[3];
                const Tensor& b2 = model.tensors[4];
                const Tensor& b = model.tensors[5];
                for (int i = 0; i < H; ++i)
                    out[i] = std::tanh(al.v[i] * u[i] * w[i] + b1.v[i] * w[i] + b2.v[i] * u[i] + b.v[i]);
                caches[t].vecs = {u, w};
                hs[t + 1] = std::move(out);
                break;
            }
            case Arch::Lstm: {
                std::vector<double> gi(H), gf(H), go(H), gg(H), cn(H), tanh_c(H), out(H);
                for (int gidx = 0; gidx < 4; ++gidx) {
                    matvec(model.tensors[4 + gidx], h, acc);
                    const Tensor& U = model.tensors[gidx];
                    for (int i = 0; i < H; ++i) {
                        double pre = U.v[static_cast<std::size_t>(i) * I + k] + acc[i];
                        double val = gidx == 3 ? std::tanh(pre) : sigmoid(pre);
                        (gidx == 0 ? gi : gidx == 1 ? gf : gidx == 2 ? go : gg)[i] = val;
                    }
                }
                for (int i = 0; i < H; ++i) {
                    cn[i] = cs[t][i] * gf[i] + gg[i] * gi[i];
                    tanh_c[i] = std::tanh(cn[i]);
                    out[i] = tanh_c[i] * go[i];
                }
                caches[t].vecs = {gi, gf, go, gg, tanh_c};
                cs[t + 1] = std::move(cn);
                hs[t + 1] = std::move(out);
                break;
            }
            case Arch::Gru: {
                std::vector<double> z(H), r(H), hh(H), hr(H), out(H);
                matvec(model.tensors[3], h, acc);
                for (int i = 0; i < H; ++i)
                    z[i] = sigmoid(model.tensors[0].v[static_cast<std::size_t>(i) * I + k] + acc[i]);
                matvec(model.tensors[4], h, acc);
                for (int i = 0; i < H; ++i)
                    r[i] = sigmoid(model.tensors[1].v[static_cast<std::size_t>(i) * I + k] + acc[i]);
                for (int i = 0; i < H; ++i) hr[i] = h[i] * r[i];
                matvec(model.tensors[5], hr, acc);
                for (int i = 0; i < H; ++i)
                    hh[i] = std::tanh(model.tensors[2].v[static_cast<std::size_t>(i) * I + k] + acc[i]);
                for (int i = 0; i < H; ++i) out[i] = (1.0 - z[i]) * hh[i] + z[i] * h[i];
                caches[t].vecs = {z, r, hh, hr};
                hs[t + 1] = std::move(out);
                break;
            }
        }
    }

    double raw = hs[T].at(0);
    double r01 = response01(model, raw);
    if (loss_out) *loss_out = loss(r01, label);
    double map_scale = response_is_sigmoid(c) ? 1.0 : 0.5;

    Gradients grads(model.tensors.size());
    for (std::size_t i = 0; i < grads.size(); ++i) grads[i].assign(model.tensors[i].size(), 0.0);

    std::vector<double> dh(H, 0.0);
    dh[0] = (r01 - static_cast<double>(label)) * map_scale;
    std::vector<double> dc(H, 0.0);  // lstm cell gradient
    std::vector<double> dpre(H), tmp(H);

    for (std::size_t t = T; t-- > 0;) {
        int k = caches[t].sym;
        const std::vector<double>& hprev = hs[t];
        const std::vector<double>& hcur = hs[t + 1];
        switch (c.arch) {
            case Arch::Elman: {
                for (int i = 0; i < H; ++i) {
                    double d = c.activation == Activation::Sigmoid ? hcur[i] * (1.0 - hcur[i])
                                                                   : 1.0 - hcur[i] * hcur[i];
                    dpre[i] = dh[i] * d;
                }
                for (int i = 0; i < H; ++i) grads[0][static_cast<std::size_t>(i) * I + k] += dpre[i];
                add_outer(grads[1], dpre, hprev);
                for (int i = 0; i < H; ++i) grads[2][i] += dpre[i];
                matvec_t(model.tensors[1], dpre, dh);
                break;
            }
            case Arch::SecondOrder: {
                const Tensor& W = model.tensors[0];
                for (int i = 0; i < H; ++i) {
                    double d = c.activation == Activation::Sigmoid ? hcur[i] * (1.0 - hcur[i])
                                                                   : 1.0 - hcur[i] * hcur[i];
                    dpre[i] = dh[i] * d;
                }
                std::fill(tmp.begin(), tmp.end(), 0.0);
                for (int i = 0; i < H; ++i) {
                    std::size_t base = (static_cast<std::size_t>(i) * H) * I + k;
                    double di = dpre[i];
                    for (int j = 0; j < H; ++j) {
                        grads[0][base + static_cast<std::size_t>(j) * I] += di * hprev[j];
                        tmp[j] += W.v[base + static_cast<std::size_t>(j) * I] * di;
                    }
                }
                dh = tmp;
                break;
            }
            case Arch::MiRnn: {
                const auto& u = caches[t].vecs[0];
                const auto& w = caches[t].vecs[1];
                const Tensor& al = model.tensors[2];
                const Tensor& b1 = model.tensors[3];
                const Tensor& b2 = model.tensors[4];
                std::vector<double> dw(H);
                for (int i = 0; i < H; ++i) {
                    double d = dh[i] * (1.0 - hcur[i] * hcur[i]);
                    dpre[i] = d;
                    grads[2][i] += d * u[i] * w[i];     // alpha
                    grads[3][i] += d * w[i];            // beta1
                    grads[4][i] += d * u[i];            // beta2
                    grads[5][i] += d;                   // b
                    double du = d * (al.v[i] * w[i] + b2.v[i]);
                    grads[0][static_cast<std::size_t>(i) * I + k] += du;
                    dw[i] = d * (al.v[i] * u[i] + b1.v[i]);
                }
                add_outer(grads[1], dw, hprev);
                matvec_t(model.tensors[1], dw, dh);
                break;
            }
            case Arch::Lstm: {
                const auto& gi = caches[t].vecs[0];
                const auto& gf = caches[t].vecs[1];
                const auto& go = caches[t].vecs[2];
                const auto& gg = caches[t].vecs[3];
                const auto& tanh_c = caches[t].vecs[4];
                std::vector<double> dgate[4];
                for (auto& d : dgate) d.assign(H, 0.0);
                std::vector<double> dc_prev(H);
                for (int i = 0; i < H; ++i) {
                    double do_ = dh[i] * tanh_c[i];
                    double dci = dc[i] + dh[i] * go[i] * (1.0 - tanh_c[i] * tanh_c[i]);
                    dgate[0][i] = dci * gg[i] * gi[i] * (1.0 - gi[i]);
                    dgate[1][i] = dci * cs[t][i] * gf[i] * (1.0 - gf[i]);
                    dgate[2][i] = do_ * go[i] * (1.0 - go[i]);
                    dgate[3][i] = dci * gi[i] * (1.0 - gg[i] * gg[i]);
                    dc_prev[i] = dci * gf[i];
                }
                std::fill(dh.begin(), dh.end(), 0.0);
                for (int gidx = 0; gidx < 4; ++gidx) {
                    for (int i = 0; i < H; ++i)
                        grads[gidx][static_cast<std::size_t>(i) * I + k] += dgate[gidx][i];
                    add_outer(grads[4 + gidx], dgate[gidx], hprev);
                    matvec_t(model.tensors[4 + gidx], dgate[gidx], tmp);
                    for (int i = 0; i < H; ++i) dh[i] += tmp[i];
                }
                dc = dc_prev;
                break;
            }
            case Arch::Gru: {
                const auto& z = caches[t].vecs[0];
                const auto& r = caches[t].vecs[1];
                const auto& hh = caches[t].vecs[2];
                const auto& hr = caches[t].vecs[3];
                std::vector<double> dh_prev(H), dprez(H), dprer(H), dpreh(H);
                for (int i = 0; i < H; ++i) {
                    double dz = dh[i] * (hprev[i] - hh[i]);
                    double dhh = dh[i] * (1.0 - z[i]);
                    dh_prev[i] = dh[i] * z[i];
                    dprez[i] = dz * z[i] * (1.0 - z[i]);
                    dpreh[i] = dhh * (1.0 - hh[i] * hh[i]);
                }
                // through the candidate state
                for (int i = 0; i < H; ++i)
                    grads[2][static_cast<std::size_t>(i) * I + k] += dpreh[i];
                add_outer(grads[5], dpreh, hr);
                matvec_t(model.tensors[5], dpreh, tmp);  // d(h ⊙ r)
                for (int i = 0; i < H; ++i) {
                    double dr = tmp[i] * hprev[i];
                    dh_prev[i] += tmp[i] * r[i];
                    dprer[i] = dr * r[i] * (1.0 - r[i]);
                }
                for (int i = 0; i < H; ++i) {
                    grads[0][static_cast<std::size_t>(i) * I + k] += dprez[i];
                    grads[1][static_cast<std::size_t>(i) * I + k] += dprer[i];
                }
                add_outer(grads[3], dprez, hprev);
                add_outer(grads[4], dprer, hprev);
                matvec_t(model.tensors[3], dprez, tmp);
                for (int i = 0; i < H; ++i) dh_prev[i] += tmp[i];
                matvec_t(model.tensors[4], dprer, tmp);
                for (int i = 0; i < H; ++i) dh_prev[i] += tmp[i];
                dh = dh_prev;
                break;
            }
        }
    }
    return grads;
}

void rmsprop_step(std::vector<double>& weights, const std::vector<double>& grads,
                  std::vector<double>& opt_state, double lr, double decay, double eps) {
    if (weights.size() != grads.size() || weights.size() != opt_state.size())
        throw std::invalid_argument("rmsprop_step: shape mismatch");
    for (std::size_t i = 0; i < weights.size(); ++i) {
        double g = grads[i];
        opt_state[i] = decay * opt_state[i] + (1.0 - decay) * g * g;
        weights[i] -= lr * g / (std::sqrt(opt_state[i]) + eps);
    }
}

RmsProp::RmsProp(const RnnModel& model, double decay, double eps)
    : decay_(decay), eps_(eps) {
    for (const auto& t : model.tensors) state_.emplace_back(t.size(), 0.0);
}

void RmsProp::step(RnnModel& model, const Gradients& grads, double lr) {
    if (grads.size() != model.tensors.size())
        throw std::invalid_argument("RmsProp::step: gradient count mismatch");
    for (std::size_t i = 0; i < grads.size(); ++i) {
        rmsprop_step(model.tensors[i].v, grads[i], state_[i], lr, decay_, eps_);
    }
}

TrainResult train(RnnModel& model, const LabeledDataset& dataset,
                  const TrainConfig& config, const std::vector<double>& h0) {
    if (dataset.train.empty()) throw std::invalid_argument("train: empty training split");

    std::vector<EncodedSequence> seqs;
    std::vector<int> labels;
    seqs.reserve(dataset.train.size());
    for (const auto& sl : dataset.train) {
        seqs.push_back(encode(sl.s));
        labels.push_back(sl.positive ? 1 : 0);
    }

    RmsProp opt(model, config.rms_decay, config.rms_epsilon);
    Rng rng(mix_seed(model.config.seed, 0x7261));
    std::vector<std::size_t> order(seqs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t idx : order) {
            double sample_loss = 0.0;
            Gradients g = grad_bptt(model, seqs[idx], labels[idx], h0, &sample_loss);
            opt.step(model, g, config.learning_rate);
            loss_sum += sample_loss;
        }
        double mean_loss = loss_sum / static_cast<double>(seqs.size());

        std::size_t correct = 0;
        for (std::size_t i = 0; i < seqs.size(); ++i) {
            StateTrace tr = forward(model, seqs[i], h0);
            bool positive = response01(model, tr.response_raw()) >= 0.5;
            if (positive == (labels[i] == 1)) ++correct;
        }
        double acc = static_cast<double>(correct) / static_cast<double>(seqs.size());

        result.history.push_back({mean_loss, acc});
        result.epochs = epoch + 1;
        if (acc == 1.0 && mean_loss < config.loss_tolerance) {
            result.converged = true;
            break;
        }
    }
    return result;
}

double accuracy(const RnnModel& model, std::span<const StringLabel> split,
                const std::vector<double>& h0) {
    if (split.empty()) throw std::invalid_argument("accuracy: empty split");
    std::size_t correct = 0;
    for (const auto& sl : split) {
        StateTrace tr = forward(model, encode(sl.s), h0);
        bool positive = response01(model, tr.response_raw()) >= 0.5;
        if (positive == sl.positive) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(split.size());
}

void save_checkpoint(const RnnModel& model, const std::vector<double>& h0,
                     const std::string& path) {
    nlohmann::json j;
    j["arch"] = to_string(model.config.arch);
    j["activation"] = to_string(model.config.activation);
    j["hidden"] = model.config.hidden;
    j["input"] = model.config.input;
    j["seed"] = model.config.seed;
    j["h0"] = h0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out << j.dump() << "\n";
    for (const auto& t : model.tensors) {
        out.write(reinterpret_cast<const char*>(t.v.data()),
                  static_cast<std::streamsize>(t.v.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

std::pair<RnnModel, std::vector<double>> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::string header;
    std::getline(in, header);
    nlohmann::json j = nlohmann::json::parse(header);
    ModelConfig c;
    c.arch = arch_from_string(j.at("arch").get<std::string>());
    c.activation = activation_from_string(j.at("activation").get<std::string>());
    c.hidden = j.at("hidden").get<int>();
    c.input = j.at("input").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    std::vector<double> h0 = j.at("h0").get<std::vector<double>>();

    RnnModel m = init_model(c);
    for (auto& t : m.tensors) {
        in.read(reinterpret_cast<char*>(t.v.data()),
                static_cast<std::streamsize>(t.v.size() * sizeof(double)));
        if (!in) throw std::runtime_error("load_checkpoint: truncated payload in " + path);
    }
    return {std::move(m), std::move(h0)};
}

}  // namespace rex
