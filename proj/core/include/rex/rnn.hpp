#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rex/dataset.hpp"

namespace rex {

enum class Arch { Elman, SecondOrder, MiRnn, Lstm, Gru };
enum class Activation { Sigmoid, Tanh };

std::string to_string(Arch a);
std::string to_string(Activation a);
Arch arch_from_string(const std::string& s);
Activation activation_from_string(const std::string& s);

struct ModelConfig {
    Arch arch = Arch::SecondOrder;
    /// Honored by Elman and second-order cells; the other architectures fix
    /// their activations and ignore this field.
    Activation activation = Activation::Sigmoid;
    int hidden = 2;
    int input = 3;
    std::uint64_t seed = 0;
};

struct Tensor {
    std::string name;
    std::vector<int> shape;
    std::vector<double> v;

    std::size_t size() const { return v.size(); }
};

/// One recurrent network; tensors follow the benchmark table's parameter
/// list order for the architecture.
struct RnnModel {
    ModelConfig config;
    std::vector<Tensor> tensors;
};

/// Hidden vectors over one sequence: hidden[0] is the initial vector and
/// one entry follows per consumed symbol, stop symbol included. LSTM models
/// carry the cell vectors alongside.
struct StateTrace {
    std::vector<std::vector<double>> hidden;
    std::vector<std::vector<double>> cell;
    std::vector<std::uint8_t> symbols;

    double response_raw() const { return hidden.back().at(0); }
};

struct TrainConfig {
    double learning_rate = 1e-3;
    double rms_decay = 0.9;
    double rms_epsilon = 1e-8;
    int max_epochs = 2000;
    double loss_tolerance = 1e-3;
};

struct EpochStats {
    double mean_loss = 0.0;
    double train_accuracy = 0.0;
};

struct TrainResult {
    bool converged = false;
    int epochs = 0;
    std::vector<EpochStats> history;
};

/// Exact number of weight and bias scalars for the architecture.
int param_count(const ModelConfig& config);

/// Smallest-on-tie hidden size whose parameter count is closest to the
/// target (the mechanism behind the shared parameter budgets).
int budget_hidden_size(Arch arch, int target_params, int input_size);

/// Weights i.i.d. uniform on [-0.1, 0.1] from the config seed.
RnnModel init_model(const ModelConfig& config);

/// True when the response neuron already lives in (0, 1); tanh-range models
/// get affinely mapped to (0, 1) before thresholding and loss.
bool response_is_sigmoid(const ModelConfig& config);
double response01(const RnnModel& model, double raw_response);

/// Initial hidden vector: uniform on [0,1] for sigmoid-range models, on
/// [-1,1] for tanh-range models.
std::vector<double> make_h0(const ModelConfig& config, std::uint64_t seed);

StateTrace forward(const RnnModel& model, const EncodedSequence& seq,
                   const std::vector<double>& h0);

/// Squared-error on the response neuron: (1/2) (y - response)^2.
double loss(double response, int label);

using Gradients = std::vector<std::vector<double>>;  // parallel to model.tensors

/// Exact loss gradients for every tensor via full backpropagation through
/// time; optionally reports the sample loss.
Gradients grad_bptt(const RnnModel& model, const EncodedSequence& seq, int label,
                    const std::vector<double>& h0, double* loss_out = nullptr);

/// One RMSprop update on a flat parameter vector:
/// v <- decay v + (1-decay) g^2;  w <- w - lr g / (sqrt(v) + eps).
void rmsprop_step(std::vector<double>& weights, const std::vector<double>& grads,
                  std::vector<double>& opt_state, double lr,
                  double decay = 0.9, double eps = 1e-8);

class RmsProp {
public:
    RmsProp(const RnnModel& model, double decay, double eps);
    void step(RnnModel& model, const Gradients& grads, double lr);

private:
    std::vector<std::vector<double>> state_;
    double decay_;
    double eps_;
};

/// Per-sample stochastic training with a seeded shuffle each epoch; stops
/// when the training split classifies perfectly at threshold 0.5 with mean
/// loss below the tolerance, or at max_epochs (flagged, not thrown).
TrainResult train(RnnModel& model, const LabeledDataset& dataset,
                  const TrainConfig& config, const std::vector<double>& h0);

/// Fraction of strings classified correctly (predict positive iff the
/// mapped response is >= 0.5).
double accuracy(const RnnModel& model, std::span<const StringLabel> split,
                const std::vector<double>& h0);

void save_checkpoint(const RnnModel& model, const std::vector<double>& h0,
                     const std::string& path);
std::pair<RnnModel, std::vector<double>> load_checkpoint(const std::string& path);

}  // namespace rex
