// SPDX-License-Identifier: Apache-2.0
#include "phaseid/infonet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "phaseid/rng.hpp"

namespace phaseid::infonet {

namespace {

constexpr double kMomentum = 0.9;
constexpr double kStatGradClip = 10.0;
constexpr double kExpClamp = 30.0;
constexpr size_t kNoisyPasses = 50;

double activate(Activation a, double v) {
  switch (a) {
    case Activation::relu: return v > 0.0 ? v : 0.0;
    case Activation::tanh: return std::tanh(v);
    case Activation::identity: return v;
  }
  return v;
}

// Derivative as a function of the pre-activation. relu uses subgradient 0
// at exactly 0.
double activate_grad(Activation a, double pre) {
  switch (a) {
    case Activation::relu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
      const double t = std::tanh(pre);
      return 1.0 - t * t;
    }
    case Activation::identity: return 1.0;
  }
  return 1.0;
}

}  // namespace

std::string to_string(Optimizer o) {
  return o == Optimizer::sgd ? "sgd" : "adam";
}

Optimizer optimizer_from_string(const std::string& s) {
  if (s == "sgd") return Optimizer::sgd;
  if (s == "adam") return Optimizer::adam;
  throw ConfigError("unknown optimizer: '" + s + "'");
}

Matrix forward(const MlpParams& params, const Matrix& x, ForwardCache* cache) {
  if (!params.layers.empty() && x.cols != params.layers.front().w.rows)
    throw ShapeMismatch("forward: input width does not match first layer");
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Matrix cur = x;
  for (const Layer& layer : params.layers) {
    if (cache) cache->inputs.push_back(cur);
    Matrix pre = matmul(cur, layer.w);
    for (size_t i = 0; i < pre.rows; ++i) {
      double* row = pre.row(i);
      for (size_t j = 0; j < pre.cols; ++j) row[j] += layer.b[j];
    }
    if (cache) cache->pre.push_back(pre);
    Matrix out(pre.rows, pre.cols);
    for (size_t i = 0; i < pre.a.size(); ++i)
      out.a[i] = activate(layer.act, pre.a[i]);
    cur = std::move(out);
  }
  return cur;
}

Gradients zero_gradients(const MlpParams& params) {
  Gradients g;
  for (const Layer& l : params.layers) {
    g.w.emplace_back(l.w.rows, l.w.cols);
    g.b.emplace_back(l.b.size(), 0.0);
  }
  return g;
}

void accumulate(Gradients& into, const Gradients& g) {
  for (size_t l = 0; l < into.w.size(); ++l) {
    for (size_t i = 0; i < into.w[l].a.size(); ++i) into.w[l].a[i] += g.w[l].a[i];
    for (size_t i = 0; i < into.b[l].size(); ++i) into.b[l][i] += g.b[l][i];
  }
}

double gradient_norm(const Gradients& g) {
  double s = 0.0;
  for (const Matrix& w : g.w)
    for (double v : w.a) s += v * v;
  for (const auto& b : g.b)
    for (double v : b) s += v * v;
  return std::sqrt(s);
}

void scale_gradients(Gradients& g, double s) {
  for (Matrix& w : g.w)
    for (double& v : w.a) v *= s;
  for (auto& b : g.b)
    for (double& v : b) v *= s;
}

Gradients backward(const MlpParams& params, const ForwardCache& cache,
                   const Matrix& output_grad, Matrix* input_grad) {
  const size_t n_layers = params.layers.size();
  if (cache.inputs.size() != n_layers || cache.pre.size() != n_layers)
    throw ShapeMismatch("backward: cache does not match network");
  if (n_layers == 0) throw ShapeMismatch("backward: empty network");
  if (output_grad.rows != cache.pre.back().rows ||
      output_grad.cols != cache.pre.back().cols)
    throw ShapeMismatch("backward: output gradient shape mismatch");

  Gradients g = zero_gradients(params);
  Matrix delta = output_grad;
  for (size_t li = n_layers; li-- > 0;) {
    const Layer& layer = params.layers[li];
    const Matrix& pre = cache.pre[li];
    // delta <- delta * act'(pre)
    for (size_t i = 0; i < delta.a.size(); ++i)
      delta.a[i] *= activate_grad(layer.act, pre.a[i]);
    g.w[li] = matmul_tn(cache.inputs[li], delta);
    for (size_t r = 0; r < delta.rows; ++r) {
      const double* row = delta.row(r);
      for (size_t j = 0; j < delta.cols; ++j) g.b[li][j] += row[j];
    }
    if (li > 0 || input_grad) {
      Matrix prev = matmul_nt(delta, layer.w);
      if (li == 0 && input_grad) *input_grad = std::move(prev);
      else delta = std::move(prev);
    }
  }
  return g;
}

MlpParams make_mlp(const std::vector<size_t>& dims,
                   const std::vector<Activation>& acts, uint64_t seed,
                   uint64_t tag) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1)
    throw ShapeMismatch("make_mlp: dims/activations mismatch");
  MlpParams p;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.w = Matrix(dims[l], dims[l + 1]);
    layer.b.assign(dims[l + 1], 0.0);
    layer.act = acts[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    for (size_t i = 0; i < layer.w.a.size(); ++i) {
      layer.w.a[i] = bound * (2.0 * rng::u01(seed, rng::kStreamWeights, tag, l, i) - 1.0);
    }
    p.layers.push_back(std::move(layer));
  }
  return p;
}

// --- optimizer --------------------------------------------------------------

namespace {

struct Updater {
  Optimizer kind = Optimizer::sgd;
  double lr = 1e-3;
  // sgd momentum state / adam first moment
  std::vector<Matrix> mw;
  std::vector<std::vector<double>> mb;
  // adam second moment
  std::vector<Matrix> vw;
  std::vector<std::vector<double>> vb;
  size_t t = 0;

  void init(const MlpParams& p, Optimizer k, double rate) {
    kind = k;
    lr = rate;
    mw.clear(); mb.clear(); vw.clear(); vb.clear();
    for (const Layer& l : p.layers) {
      mw.emplace_back(l.w.rows, l.w.cols);
      mb.emplace_back(l.b.size(), 0.0);
      if (kind == Optimizer::adam) {
        vw.emplace_back(l.w.rows, l.w.cols);
        vb.emplace_back(l.b.size(), 0.0);
      }
    }
  }

  void apply(MlpParams& p, const Gradients& g) {
    ++t;
    if (kind == Optimizer::sgd) {
      for (size_t l = 0; l < p.layers.size(); ++l) {
        for (size_t i = 0; i < p.layers[l].w.a.size(); ++i) {
          mw[l].a[i] = kMomentum * mw[l].a[i] - lr * g.w[l].a[i];
          p.layers[l].w.a[i] += mw[l].a[i];
        }
        for (size_t i = 0; i < p.layers[l].b.size(); ++i) {
          mb[l][i] = kMomentum * mb[l][i] - lr * g.b[l][i];
          p.layers[l].b[i] += mb[l][i];
        }
      }
    } else {
      const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
      for (size_t l = 0; l < p.layers.size(); ++l) {
        for (size_t i = 0; i < p.layers[l].w.a.size(); ++i) {
          const double gr = g.w[l].a[i];
          mw[l].a[i] = b1 * mw[l].a[i] + (1 - b1) * gr;
          vw[l].a[i] = b2 * vw[l].a[i] + (1 - b2) * gr * gr;
          p.layers[l].w.a[i] -= lr * (mw[l].a[i] / c1) / (std::sqrt(vw[l].a[i] / c2) + eps);
        }
        for (size_t i = 0; i < p.layers[l].b.size(); ++i) {
          const double gr = g.b[l][i];
          mb[l][i] = b1 * mb[l][i] + (1 - b1) * gr;
          vb[l][i] = b2 * vb[l][i] + (1 - b2) * gr * gr;
          p.layers[l].b[i] -= lr * (mb[l][i] / c1) / (std::sqrt(vb[l][i] / c2) + eps);
        }
      }
    }
  }
};

Matrix gather_rows(const Matrix& src, const std::vector<size_t>& rows) {
  Matrix out(rows.size(), src.cols);
  for (size_t i = 0; i < rows.size(); ++i)
    std::copy(src.row(rows[i]), src.row(rows[i]) + src.cols, out.row(i));
  return out;
}

// relu(NaN) is 0, so poisoned features would silently vanish inside the
// network; reject them up front instead.
void require_finite(const Matrix& x, const char* who) {
  for (double v : x.a)
    if (!std::isfinite(v)) throw Diverged(std::string(who) + ": non-finite input");
}

Matrix concat_cols(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows, a.cols + b.cols);
  for (size_t i = 0; i < a.rows; ++i) {
    std::copy(a.row(i), a.row(i) + a.cols, out.row(i));
    std::copy(b.row(i), b.row(i) + b.cols, out.row(i) + a.cols);
  }
  return out;
}

// Mean t(joint) - mean exp(t(marg) - 1) plus output gradients scaled by
// `sign` for ascent within a larger minimization.
struct MiTerms {
  double estimate = 0.0;
  Matrix d_tj;  // gradient of (-estimate) wrt joint outputs, scaled by beta
  Matrix d_tm;  // same for marginal outputs
};

MiTerms mi_objective(const Matrix& tj, const Matrix& tm, double beta) {
  const double nb = static_cast<double>(tj.rows);
  MiTerms out;
  out.d_tj = Matrix(tj.rows, 1);
  out.d_tm = Matrix(tm.rows, 1);
  double joint = 0.0, marg = 0.0;
  for (size_t i = 0; i < tj.rows; ++i) {
    joint += tj(i, 0);
    out.d_tj(i, 0) = -beta / nb;
  }
  for (size_t i = 0; i < tm.rows; ++i) {
    const double e = tm(i, 0) - 1.0;
    const double ec = std::min(e, kExpClamp);
    marg += std::exp(ec);
    // clamped exponent contributes zero gradient
    out.d_tm(i, 0) = e < kExpClamp ? beta * std::exp(e) / nb : 0.0;
  }
  out.estimate = joint / nb - marg / nb;
  return out;
}

}  // namespace

double minef_estimate(const Matrix& x_samples, const Matrix& z_samples_paired,
                      StatNetParams& statnet, size_t steps, double lr,
                      uint64_t seed) {
  if (x_samples.rows != z_samples_paired.rows)
    throw ShapeMismatch("minef_estimate: sample counts differ");
  if (statnet.input_dim() != x_samples.cols + z_samples_paired.cols ||
      statnet.output_dim() != 1)
    throw ShapeMismatch("minef_estimate: statnet shape mismatch");
  require_finite(x_samples, "minef_estimate");
  require_finite(z_samples_paired, "minef_estimate");
  const size_t n = x_samples.rows;
  const size_t batch = std::min<size_t>(256, n);

  Updater opt;
  opt.init(statnet, Optimizer::sgd, lr);
  rng::Stream batch_stream(seed, rng::kStreamBatch);
  rng::Stream derange_stream(seed, rng::kStreamDerange);

  for (size_t step = 0; step < steps; ++step) {
    const std::vector<size_t> idx =
        rng::sample_without_replacement(n, batch, batch_stream);
    const Matrix xb = gather_rows(x_samples, idx);
    const Matrix zb = gather_rows(z_samples_paired, idx);
    const std::vector<size_t> perm = rng::derangement(batch, derange_stream);

    Matrix zm(batch, zb.cols);
    for (size_t i = 0; i < batch; ++i)
      std::copy(zb.row(perm[i]), zb.row(perm[i]) + zb.cols, zm.row(i));

    ForwardCache cj, cm;
    const Matrix tj = forward(statnet, concat_cols(xb, zb), &cj);
    const Matrix tm = forward(statnet, concat_cols(xb, zm), &cm);
    const MiTerms mi = mi_objective(tj, tm, 1.0);
    if (!std::isfinite(mi.estimate))
      throw Diverged("minef_estimate: objective became non-finite");

    Gradients g = backward(statnet, cj, mi.d_tj);
    accumulate(g, backward(statnet, cm, mi.d_tm));
    const double norm = gradient_norm(g);
    if (norm > kStatGradClip) scale_gradients(g, kStatGradClip / norm);
    opt.apply(statnet, g);
  }

  // Full-sample estimate with a fixed shift pairing.
  Matrix zm(n, z_samples_paired.cols);
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    std::copy(z_samples_paired.row(j), z_samples_paired.row(j) + zm.cols, zm.row(i));
  }
  const Matrix tj = forward(statnet, concat_cols(x_samples, z_samples_paired));
  const Matrix tm = forward(statnet, concat_cols(x_samples, zm));
  const double est = mi_objective(tj, tm, 1.0).estimate;
  if (!std::isfinite(est)) throw Diverged("minef_estimate: final estimate non-finite");
  return est;
}

double estimate_mmi(const VoltageDataset& data, const EncoderConfig& encoder_config,
                    const StatConfig& stat_config, size_t steps, double lr,
                    uint64_t seed) {
  const Matrix& x = data.voltages;
  require_finite(x, "estimate_mmi");
  const size_t n = x.rows, d = x.cols;
  const size_t u_dim = encoder_config.output_dim;
  MlpParams encoder = make_mlp({d, encoder_config.hidden_width, u_dim},
                               {Activation::relu, Activation::identity}, seed, 0xE0C);
  StatNetParams statnet = make_mlp({d + u_dim, stat_config.hidden_width, 1},
                                   {Activation::relu, Activation::identity}, seed, 0x57A);

  Updater enc_opt, stat_opt;
  enc_opt.init(encoder, Optimizer::sgd, lr);
  stat_opt.init(statnet, Optimizer::sgd, lr);
  rng::Stream batch_stream(seed, rng::kStreamBatch);
  rng::Stream derange_stream(seed, rng::kStreamDerange);

  const size_t batch = std::min<size_t>(128, n);
  for (size_t step = 0; step < steps; ++step) {
    const std::vector<size_t> idx =
        rng::sample_without_replacement(n, batch, batch_stream);
    const Matrix xb = gather_rows(x, idx);

    ForwardCache enc_cache;
    Matrix u = forward(encoder, xb, &enc_cache);
    // Additive Gaussian noise keeps the channel genuinely stochastic; the
    // gradient passes straight through.
    for (size_t i = 0; i < batch; ++i)
      for (size_t j = 0; j < u_dim; ++j)
        u(i, j) += encoder_config.noise_std *
                   rng::normal(seed, rng::kStreamNoise, step, i, j);

    const std::vector<size_t> perm = rng::derangement(batch, derange_stream);
    Matrix um(batch, u_dim);
    for (size_t i = 0; i < batch; ++i)
      std::copy(u.row(perm[i]), u.row(perm[i]) + u_dim, um.row(i));

    ForwardCache cj, cm;
    const Matrix tj = forward(statnet, concat_cols(xb, u), &cj);
    const Matrix tm = forward(statnet, concat_cols(xb, um), &cm);
    const MiTerms mi = mi_objective(tj, tm, 1.0);
    if (!std::isfinite(mi.estimate))
      throw Diverged("estimate_mmi: objective became non-finite");

    Matrix din_j, din_m;
    Gradients sg = backward(statnet, cj, mi.d_tj, &din_j);
    accumulate(sg, backward(statnet, cm, mi.d_tm, &din_m));
    const double norm = gradient_norm(sg);
    if (norm > kStatGradClip) scale_gradients(sg, kStatGradClip / norm);

    // Route the u-part of the statnet input gradients back to the encoder;
    // the marginal pairs scatter through the derangement.
    Matrix du(batch, u_dim);
    for (size_t i = 0; i < batch; ++i)
      for (size_t j = 0; j < u_dim; ++j) du(i, j) = din_j(i, d + j);
    for (size_t i = 0; i < batch; ++i)
      for (size_t j = 0; j < u_dim; ++j) du(perm[i], j) += din_m(i, d + j);

    Gradients eg = backward(encoder, enc_cache, du);
    const double enc_norm = gradient_norm(eg);
    if (enc_norm > kStatGradClip) scale_gradients(eg, kStatGradClip / enc_norm);
    stat_opt.apply(statnet, sg);
    enc_opt.apply(encoder, eg);
  }

  // Final full-pass estimate with one stochastic encoding.
  Matrix u = forward(encoder, x);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < u_dim; ++j)
      u(i, j) += encoder_config.noise_std *
                 rng::normal(seed, rng::kStreamNoise, steps, i, j);
  Matrix um(n, u_dim);
  for (size_t i = 0; i < n; ++i) {
    const size_t p = (i + 1) % n;
    std::copy(u.row(p), u.row(p) + u_dim, um.row(i));
  }
  const Matrix tj = forward(statnet, concat_cols(x, u));
  const Matrix tm = forward(statnet, concat_cols(x, um));
  const double est = mi_objective(tj, tm, 1.0).estimate;
  if (!std::isfinite(est)) throw Diverged("estimate_mmi: final estimate non-finite");
  return est / std::log(2.0);
}

// --- classifier -------------------------------------------------------------

namespace {

struct CeResult {
  double loss = 0.0;
  Matrix dlogits;  // (softmax - onehot) / batch
};

CeResult softmax_cross_entropy(const Matrix& logits, const std::vector<size_t>& y) {
  CeResult res;
  res.dlogits = Matrix(logits.rows, logits.cols);
  const double nb = static_cast<double>(logits.rows);
  for (size_t i = 0; i < logits.rows; ++i) {
    const double* row = logits.row(i);
    double mx = row[0];
    for (size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, row[j]);
    double z = 0.0;
    for (size_t j = 0; j < logits.cols; ++j) z += std::exp(row[j] - mx);
    const double logz = std::log(z) + mx;
    res.loss += (logz - row[y[i]]) / nb;
    for (size_t j = 0; j < logits.cols; ++j)
      res.dlogits(i, j) = (std::exp(row[j] - logz) - (j == y[i] ? 1.0 : 0.0)) / nb;
  }
  return res;
}

}  // namespace

ClassifierModel train_classifier(const VoltageDataset& data, const IndexSet& labeled,
                                 const std::vector<PhaseLabel>& labels,
                                 const std::vector<PhaseLabel>& vocab,
                                 const TrainingConfig& config) {
  if (labeled.empty()) throw NoLabels("train_classifier: empty labeled subset");
  if (labels.size() != labeled.size())
    throw ShapeMismatch("train_classifier: labels do not match subset size");
  if (vocab.empty()) throw NoLabels("train_classifier: empty vocabulary");
  if (config.beta < 0.0) throw ConfigError("train_classifier: beta must be >= 0");
  if (config.hidden_width < 1 || config.stat_hidden_width < 1)
    throw ConfigError("train_classifier: widths must be >= 1");
  const Matrix& x = data.voltages;
  require_finite(x, "train_classifier");
  const size_t n = x.rows, d = x.cols;
  const size_t n_classes = vocab.size();

  std::vector<size_t> y(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    const auto it = std::find(vocab.begin(), vocab.end(), labels[i]);
    if (it == vocab.end())
      throw UnknownLabel("train_classifier: label outside vocabulary");
    y[i] = static_cast<size_t>(it - vocab.begin());
  }

  ClassifierModel model;
  model.config = config;
  model.label_vocab = vocab;
  model.encoder = make_mlp({d, config.hidden_width}, {Activation::relu},
                           config.seed, 0xE4C);
  model.head = make_mlp({config.hidden_width, n_classes}, {Activation::identity},
                        config.seed, 0x4EAD);
  model.statnet = make_mlp({d + config.hidden_width, config.stat_hidden_width, 1},
                           {Activation::relu, Activation::identity}, config.seed, 0x57A);

  Updater enc_opt, head_opt, stat_opt;
  enc_opt.init(model.encoder, config.optimizer, config.learning_rate);
  head_opt.init(model.head, config.optimizer, config.learning_rate);
  stat_opt.init(model.statnet, config.optimizer, config.learning_rate);

  const Matrix x_labeled = gather_rows(x, labeled.indices);
  const size_t n_labeled = labeled.size();
  const size_t batch = std::max<size_t>(1, config.batch_size);
  const size_t ce_steps = (n_labeled + batch - 1) / batch;
  const bool use_mi = config.beta > 0.0;
  const size_t mi_batch = std::min(batch, n);

  rng::Stream ce_shuffle(config.seed, rng::kStreamShuffle);
  rng::Stream mi_batches(config.seed, rng::kStreamBatch);
  rng::Stream mi_derange(config.seed, rng::kStreamDerange);

  std::vector<size_t> order(n_labeled);
  std::iota(order.begin(), order.end(), size_t{0});

  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (n_labeled > batch) rng::shuffle(order, ce_shuffle);
    double epoch_ce = 0.0, epoch_mi = 0.0;
    for (size_t step = 0; step < ce_steps; ++step) {
      const size_t lo = step * batch;
      const size_t hi = std::min(lo + batch, n_labeled);
      std::vector<size_t> rows(order.begin() + lo, order.begin() + hi);
      Matrix xb = gather_rows(x_labeled, rows);
      std::vector<size_t> yb(rows.size());
      for (size_t i = 0; i < rows.size(); ++i) yb[i] = y[rows[i]];

      ForwardCache enc_cache, head_cache;
      const Matrix z = forward(model.encoder, xb, &enc_cache);
      const Matrix logits = forward(model.head, z, &head_cache);
      const CeResult ce = softmax_cross_entropy(logits, yb);

      Matrix dz;
      Gradients head_g = backward(model.head, head_cache, ce.dlogits, &dz);
      Gradients enc_g = backward(model.encoder, enc_cache, dz);

      double mi_value = 0.0;
      if (use_mi) {
        const std::vector<size_t> idx =
            rng::sample_without_replacement(n, mi_batch, mi_batches);
        const Matrix xm = gather_rows(x, idx);
        ForwardCache mi_enc_cache;
        const Matrix zb = forward(model.encoder, xm, &mi_enc_cache);
        const std::vector<size_t> perm = rng::derangement(mi_batch, mi_derange);
        Matrix zm(mi_batch, zb.cols);
        for (size_t i = 0; i < mi_batch; ++i)
          std::copy(zb.row(perm[i]), zb.row(perm[i]) + zb.cols, zm.row(i));

        ForwardCache cj, cm;
        const Matrix tj = forward(model.statnet, concat_cols(xm, zb), &cj);
        const Matrix tm = forward(model.statnet, concat_cols(xm, zm), &cm);
        const MiTerms mi = mi_objective(tj, tm, config.beta);
        mi_value = mi.estimate;

        Matrix din_j, din_m;
        Gradients stat_g = backward(model.statnet, cj, mi.d_tj, &din_j);
        accumulate(stat_g, backward(model.statnet, cm, mi.d_tm, &din_m));
        const double norm = gradient_norm(stat_g);
        if (norm > kStatGradClip) scale_gradients(stat_g, kStatGradClip / norm);

        Matrix dzb(mi_batch, zb.cols);
        for (size_t i = 0; i < mi_batch; ++i)
          for (size_t j = 0; j < zb.cols; ++j) dzb(i, j) = din_j(i, d + j);
        for (size_t i = 0; i < mi_batch; ++i)
          for (size_t j = 0; j < zb.cols; ++j) dzb(perm[i], j) += din_m(i, d + j);
        accumulate(enc_g, backward(model.encoder, mi_enc_cache, dzb));
        stat_opt.apply(model.statnet, stat_g);
      }

      head_opt.apply(model.head, head_g);
      enc_opt.apply(model.encoder, enc_g);

      epoch_ce += ce.loss;
      epoch_mi += mi_value;
    }
    EpochStats stats;
    stats.cross_entropy = epoch_ce / static_cast<double>(ce_steps);
    stats.mi_estimate = epoch_mi / static_cast<double>(ce_steps);
    stats.total_loss = stats.cross_entropy - config.beta * stats.mi_estimate;
    if (!std::isfinite(stats.total_loss))
      throw Diverged("train_classifier: loss became non-finite at epoch " +
                     std::to_string(epoch));
    model.trace.push_back(stats);
  }
  return model;
}

Prediction predict(const ClassifierModel& model, const VoltageDataset& data,
                   uint64_t seed) {
  const Matrix& x = data.voltages;
  Prediction out;
  if (model.encoder_noise_std > 0.0) {
    Matrix mean(x.rows, model.encoder.output_dim());
    for (size_t pass = 0; pass < kNoisyPasses; ++pass) {
      Matrix z = forward(model.encoder, x);
      for (size_t i = 0; i < z.rows; ++i)
        for (size_t j = 0; j < z.cols; ++j)
          z(i, j) += model.encoder_noise_std *
                     rng::normal(seed, rng::kStreamNoise, pass, i, j);
      for (size_t i = 0; i < z.a.size(); ++i) mean.a[i] += z.a[i];
    }
    for (double& v : mean.a) v /= static_cast<double>(kNoisyPasses);
    out.representation = std::move(mean);
  } else {
    out.representation = forward(model.encoder, x);
  }

  const Matrix logits = forward(model.head, out.representation);
  out.labels.resize(x.rows);
  for (size_t i = 0; i < x.rows; ++i) {
    size_t arg = 0;
    for (size_t j = 1; j < logits.cols; ++j)
      if (logits(i, j) > logits(i, arg)) arg = j;
    out.labels[i] = model.label_vocab[arg];
  }
  return out;
}

double evaluate_accuracy(const std::vector<PhaseLabel>& predicted,
                         const std::vector<PhaseLabel>& truth) {
  if (predicted.size() != truth.size())
    throw ShapeMismatch("evaluate_accuracy: length mismatch");
  if (predicted.empty()) throw ShapeMismatch("evaluate_accuracy: empty input");
  size_t hit = 0;
  for (size_t i = 0; i < predicted.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(predicted.size());
}

// --- serialization ----------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'P', 'H', 'I', 'D', 'M', 'D', 'L', '1'};

void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xFF;
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

void put_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xFF;
  os.write(reinterpret_cast<const char*>(b), 8);
}

uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double d) {
  uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(os, v);
}

double get_f64(std::istream& is) {
  const uint64_t v = get_u64(is);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

void put_mlp(std::ostream& os, const MlpParams& p) {
  put_u32(os, static_cast<uint32_t>(p.layers.size()));
  for (const Layer& l : p.layers) {
    put_u32(os, static_cast<uint32_t>(l.w.rows));
    put_u32(os, static_cast<uint32_t>(l.w.cols));
    put_u32(os, static_cast<uint32_t>(l.act));
    for (double v : l.w.a) put_f64(os, v);
    for (double v : l.b) put_f64(os, v);
  }
}

MlpParams get_mlp(std::istream& is) {
  MlpParams p;
  const uint32_t n_layers = get_u32(is);
  for (uint32_t i = 0; i < n_layers; ++i) {
    Layer l;
    const uint32_t rows = get_u32(is);
    const uint32_t cols = get_u32(is);
    l.act = static_cast<Activation>(get_u32(is));
    l.w = Matrix(rows, cols);
    for (double& v : l.w.a) v = get_f64(is);
    l.b.resize(cols);
    for (double& v : l.b) v = get_f64(is);
    p.layers.push_back(std::move(l));
  }
  return p;
}

}  // namespace

void save_model(const ClassifierModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("save_model: cannot open '" + path + "'");
  os.write(kMagic, 8);
  put_mlp(os, model.encoder);
  put_mlp(os, model.head);
  put_mlp(os, model.statnet);
  put_u32(os, static_cast<uint32_t>(model.label_vocab.size()));
  for (PhaseLabel l : model.label_vocab) {
    const std::string s = circuit::to_string(l);
    put_u32(os, static_cast<uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  put_f64(os, model.config.beta);
  put_f64(os, model.config.learning_rate);
  put_u64(os, model.config.epochs);
  put_u64(os, model.config.batch_size);
  put_u64(os, model.config.hidden_width);
  put_u64(os, model.config.stat_hidden_width);
  put_u64(os, model.config.seed);
  put_u32(os, static_cast<uint32_t>(model.config.optimizer));
  put_f64(os, model.encoder_noise_std);
  put_u32(os, static_cast<uint32_t>(model.trace.size()));
  for (const EpochStats& s : model.trace) {
    put_f64(os, s.total_loss);
    put_f64(os, s.cross_entropy);
    put_f64(os, s.mi_estimate);
  }
  if (!os) throw IoError("save_model: write failed for '" + path + "'");
}

ClassifierModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("load_model: cannot open '" + path + "'");
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw ParseError("load_model: bad magic in '" + path + "'");
  ClassifierModel m;
  m.encoder = get_mlp(is);
  m.head = get_mlp(is);
  m.statnet = get_mlp(is);
  const uint32_t vocab = get_u32(is);
  for (uint32_t i = 0; i < vocab; ++i) {
    const uint32_t len = get_u32(is);
    std::string s(len, '\0');
    is.read(s.data(), len);
    m.label_vocab.push_back(circuit::phase_from_string(s));
  }
  m.config.beta = get_f64(is);
  m.config.learning_rate = get_f64(is);
  m.config.epochs = get_u64(is);
  m.config.batch_size = get_u64(is);
  m.config.hidden_width = get_u64(is);
  m.config.stat_hidden_width = get_u64(is);
  m.config.seed = get_u64(is);
  m.config.optimizer = static_cast<Optimizer>(get_u32(is));
  m.encoder_noise_std = get_f64(is);
  const uint32_t trace = get_u32(is);
  for (uint32_t i = 0; i < trace; ++i) {
    EpochStats s;
    s.total_loss = get_f64(is);
    s.cross_entropy = get_f64(is);
    s.mi_estimate = get_f64(is);
    m.trace.push_back(s);
  }
  if (!is) throw ParseError("load_model: truncated file '" + path + "'");
  return m;
}

}  // namespace phaseid::infonet
