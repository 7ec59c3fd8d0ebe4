// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "phaseid/circuit.hpp"

namespace phaseid::pipeline {

using circuit::VoltageDataset;

struct LoadResult {
  VoltageDataset data;
  size_t imputed_cells = 0;  // empty voltage fields filled with the row mean
};

// Voltage CSV: header "customer_id,t0,...,t{T-1}", one row per customer.
// Labels CSV (optional): header "customer_id,phase". Empty voltage cells
// are imputed with the mean of the row's present cells.
LoadResult load_dataset(const std::string& voltage_csv_path,
                        const std::string& labels_csv_path = "");

void save_voltages_csv(const VoltageDataset& data, const std::string& path);
void save_labels_csv(const VoltageDataset& data, const std::string& path);

// Square numeric CSV without header.
SymMatrix load_covariance_csv(const std::string& path);
void save_covariance_csv(const SymMatrix& m, const std::string& path);

// Shortest round-trip-exact decimal form of a double.
std::string format_double(double v);

}  // namespace phaseid::pipeline
