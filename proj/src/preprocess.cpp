// SPDX-License-Identifier: Apache-2.0
#include "phaseid/preprocess.hpp"

#include <cmath>

namespace phaseid::pipeline {

VoltageDataset self_normalize(const VoltageDataset& data) {
  VoltageDataset out = data;
  const size_t n = data.n_customers, t = data.n_timesteps;
  for (size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (size_t j = 0; j < t; ++j) mean += data.voltages(i, j);
    mean /= static_cast<double>(t);
    if (std::abs(mean) < 1e-12)
      throw ZeroMeanRow("self_normalize: customer " + std::to_string(i) +
                        " has zero time-average");
    for (size_t j = 0; j < t; ++j) out.voltages(i, j) = data.voltages(i, j) / mean;
  }
  return out;
}

BatchNormResult batch_normalize(const VoltageDataset& data) {
  const size_t n = data.n_customers, t = data.n_timesteps;
  BatchNormResult res;
  std::vector<double> mu(t), sd(t);
  std::vector<bool> keep(t, true);
  for (size_t j = 0; j < t; ++j) {
    double m = 0.0;
    for (size_t i = 0; i < n; ++i) m += data.voltages(i, j);
    m /= static_cast<double>(n);
    double v = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double d = data.voltages(i, j) - m;
      v += d * d;
    }
    const double s = std::sqrt(v / static_cast<double>(n));
    mu[j] = m;
    sd[j] = s;
    if (s <= 1e-12) {
      keep[j] = false;
      res.dropped_columns.push_back(j);
    }
  }
  size_t kept = 0;
  for (size_t j = 0; j < t; ++j) kept += keep[j];

  res.data.n_customers = n;
  res.data.n_timesteps = kept;
  res.data.labels = data.labels;
  res.data.voltages = Matrix(n, kept);
  res.means.reserve(kept);
  res.stds.reserve(kept);
  size_t out_j = 0;
  for (size_t j = 0; j < t; ++j) {
    if (!keep[j]) continue;
    res.means.push_back(mu[j]);
    res.stds.push_back(sd[j]);
    for (size_t i = 0; i < n; ++i)
      res.data.voltages(i, out_j) = (data.voltages(i, j) - mu[j]) / sd[j];
    ++out_j;
  }
  return res;
}

VoltageDataset apply_batch_stats(const VoltageDataset& data,
                                 const std::vector<double>& means,
                                 const std::vector<double>& stds,
                                 const std::vector<size_t>& dropped_columns) {
  const size_t n = data.n_customers, t = data.n_timesteps;
  std::vector<bool> keep(t, true);
  for (size_t j : dropped_columns) {
    if (j < t) keep[j] = false;
  }
  size_t kept = 0;
  for (size_t j = 0; j < t; ++j) kept += keep[j];
  if (kept != means.size() || kept != stds.size())
    throw ShapeMismatch("apply_batch_stats: statistics do not match data");

  VoltageDataset out;
  out.n_customers = n;
  out.n_timesteps = kept;
  out.labels = data.labels;
  out.voltages = Matrix(n, kept);
  size_t out_j = 0;
  for (size_t j = 0; j < t; ++j) {
    if (!keep[j]) continue;
    for (size_t i = 0; i < n; ++i)
      out.voltages(i, out_j) = (data.voltages(i, j) - means[out_j]) / stds[out_j];
    ++out_j;
  }
  return out;
}

VoltageDataset preprocess(const VoltageDataset& data) {
  return batch_normalize(self_normalize(data)).data;
}

}  // namespace phaseid::pipeline
