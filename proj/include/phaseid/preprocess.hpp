// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "phaseid/circuit.hpp"

namespace phaseid::pipeline {

using circuit::VoltageDataset;

// Divide each customer row by its own time mean, making every row mean 1.
// Removes the 120V/240V service-level split before any learning.
VoltageDataset self_normalize(const VoltageDataset& data);

struct BatchNormResult {
  VoltageDataset data;
  std::vector<double> means;            // per kept column
  std::vector<double> stds;             // per kept column
  std::vector<size_t> dropped_columns;  // original indices of constant columns
};

// Standardize each time column across customers to mean 0, std 1
// (population std). Constant columns are dropped and reported.
BatchNormResult batch_normalize(const VoltageDataset& data);

// Re-apply stored statistics to held-out data with the same columns.
VoltageDataset apply_batch_stats(const VoltageDataset& data,
                                 const std::vector<double>& means,
                                 const std::vector<double>& stds,
                                 const std::vector<size_t>& dropped_columns);

// self_normalize then batch_normalize, in that order.
VoltageDataset preprocess(const VoltageDataset& data);

}  // namespace phaseid::pipeline
