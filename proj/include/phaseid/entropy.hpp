// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "phaseid/matrix.hpp"

namespace phaseid::entropy {

struct EntropyBounds {
  double lower_nats = 0.0;
  double upper_nats = 0.0;
  double lower_bits() const;
  double upper_bits() const;
};

// Closed-form per-customer entropy bounds for the linearized feeder model:
//   lower = ln(e/n) - (1/n) ln(sqrt(2*pi/e^2) / (n+1))
//   upper = (1/2) ln(12e/n) - (1/n) ln(sqrt(e^2/(4*pi)) / (n+1))
EntropyBounds feeder_entropy_bounds(size_t n);

// D S D with D = diag(1/sqrt(S_ii)); unit diagonal within 1e-12.
SymMatrix scale_to_unit_diagonal(const SymMatrix& sigma);

// Differential entropy of N(0, sigma_tilde) in nats:
// (1/2)(n ln(2*pi*e) + ln det).
double gaussian_entropy(const SymMatrix& sigma_tilde);

// h2(p_e) + p_e log2(n_classes - 1), in bits; h2(0) = h2(1) = 0.
double fano_expression(double p_e, size_t n_classes);

// (p_y / n) * Trace sqrt(K/K_SS): the computable first term of the
// conditional total-variation bound.
double delta_bound_term(const SymMatrix& k, const IndexSet& s, double p_y);

struct EntropyReport {
  size_t n = 0;
  double lower_nats = 0.0;
  double upper_nats = 0.0;
  std::optional<double> gaussian_entropy_nats;  // whole-vector entropy
  std::string notes;

  // Flat key=value text record.
  std::string to_text() const;
};

EntropyReport make_report(size_t n, std::optional<double> gaussian_nats,
                          const std::string& notes);

}  // namespace phaseid::entropy
