// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phaseid/circuit.hpp"
#include "phaseid/matrix.hpp"

namespace phaseid::infonet {

using circuit::PhaseLabel;
using circuit::VoltageDataset;

enum class Activation { relu, tanh, identity };

struct Layer {
  Matrix w;               // in x out
  std::vector<double> b;  // out
  Activation act = Activation::identity;
};

struct MlpParams {
  std::vector<Layer> layers;

  size_t input_dim() const { return layers.empty() ? 0 : layers.front().w.rows; }
  size_t output_dim() const { return layers.empty() ? 0 : layers.back().w.cols; }
};

// The statistic network t(x, z) is an MLP over the concatenation [x | z]
// with scalar output.
using StatNetParams = MlpParams;

enum class Optimizer { sgd, adam };
std::string to_string(Optimizer o);
Optimizer optimizer_from_string(const std::string& s);

struct TrainingConfig {
  double beta = 0.1;            // information-loading weight
  double learning_rate = 1e-3;
  size_t epochs = 200;
  size_t batch_size = 64;
  size_t hidden_width = 500;
  size_t stat_hidden_width = 1000;
  uint64_t seed = 0;
  Optimizer optimizer = Optimizer::sgd;  // sgd carries momentum 0.9
};

struct EpochStats {
  double total_loss = 0.0;     // cross_entropy - beta * mi_estimate, exactly
  double cross_entropy = 0.0;
  double mi_estimate = 0.0;    // nats
};

struct ClassifierModel {
  MlpParams encoder;   // r(x): one hidden relu layer; output is the representation
  MlpParams head;      // affine logits -> softmax over the vocabulary
  StatNetParams statnet;
  std::vector<PhaseLabel> label_vocab;
  TrainingConfig config;
  std::vector<EpochStats> trace;
  double encoder_noise_std = 0.0;  // >0 enables stochastic representation passes
};

// --- core network plumbing -------------------------------------------------

struct ForwardCache {
  std::vector<Matrix> inputs;  // input of each layer
  std::vector<Matrix> pre;     // pre-activation of each layer
};

// Batched affine+activation chain; rows of x are samples.
Matrix forward(const MlpParams& params, const Matrix& x, ForwardCache* cache = nullptr);

struct Gradients {
  std::vector<Matrix> w;
  std::vector<std::vector<double>> b;
};

Gradients zero_gradients(const MlpParams& params);
void accumulate(Gradients& into, const Gradients& g);
double gradient_norm(const Gradients& g);
void scale_gradients(Gradients& g, double s);

// Exact reverse-mode gradients for the cached forward pass. output_grad has
// one row per sample. When input_grad is non-null it receives dL/dx.
Gradients backward(const MlpParams& params, const ForwardCache& cache,
                   const Matrix& output_grad, Matrix* input_grad = nullptr);

// He-style uniform initialization, deterministic per (seed, tag).
MlpParams make_mlp(const std::vector<size_t>& dims,
                   const std::vector<Activation>& acts, uint64_t seed,
                   uint64_t tag);

// --- estimators and training ----------------------------------------------

// Variational mutual-information lower bound: ascends
// E_joint[t(x,z)] - E_marginal[e^{t(x,z)-1}] over the statistic network,
// pairing marginal samples by in-batch derangement. Returns the final
// full-sample objective in nats. Exponents are clamped at 30.
double minef_estimate(const Matrix& x_samples, const Matrix& z_samples_paired,
                      StatNetParams& statnet, size_t steps, double lr,
                      uint64_t seed = 0);

struct EncoderConfig {
  size_t hidden_width = 256;
  size_t output_dim = 32;
  double noise_std = 0.1;  // additive Gaussian noise on u
};

struct StatConfig {
  size_t hidden_width = 1000;
};

// Maximum mutual information a stochastic encoder family can carry about
// the rows of `data`: jointly ascends encoder and statistic network on the
// same objective. Returns bits.
double estimate_mmi(const VoltageDataset& data, const EncoderConfig& encoder_config,
                    const StatConfig& stat_config, size_t steps, double lr = 1e-3,
                    uint64_t seed = 0);

// Supervised training with the information-loading term: per batch,
//   loss = CE(head(r(x_labeled)), y) - beta * [mean t(x_j, r(x_j))
//          - mean e^{t(x_p, r(x_m)) - 1}]
// where the MI batches are drawn from all rows, labeled or not, and the
// marginal pairing is a random in-batch derangement. Deterministic per seed.
ClassifierModel train_classifier(const VoltageDataset& data, const IndexSet& labeled,
                                 const std::vector<PhaseLabel>& labels,
                                 const std::vector<PhaseLabel>& vocab,
                                 const TrainingConfig& config);

struct Prediction {
  std::vector<PhaseLabel> labels;
  Matrix representation;  // one row per customer
};

// Argmax class per row. With a noisy encoder the representation is the
// mean of 50 stochastic passes; otherwise a single deterministic pass.
Prediction predict(const ClassifierModel& model, const VoltageDataset& data,
                   uint64_t seed = 0);

double evaluate_accuracy(const std::vector<PhaseLabel>& predicted,
                         const std::vector<PhaseLabel>& truth);

// Versioned binary container; round-trips bit-exactly.
void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(const std::string& path);

}  // namespace phaseid::infonet
