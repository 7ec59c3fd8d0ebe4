// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "phaseid/matrix.hpp"

namespace phaseid::circuit {

enum class PhaseLabel { A, B, C, AB, BC, CA, ABC };
inline constexpr size_t kNumPhaseLabels = 7;

std::string to_string(PhaseLabel l);
PhaseLabel phase_from_string(const std::string& s);  // throws UnknownLabel
bool is_single_phase(PhaseLabel l);
bool is_two_phase(PhaseLabel l);

// Current-injection phase vector, components ordered (A, B, C, n).
struct PhiVector {
  std::array<double, 4> v{0, 0, 0, 0};
};

double inner(const PhiVector& a, const PhiVector& b);

// Raw phasor form: An -> (1,0,0,-1), AB -> (1,-1,0,0), ...
// ABC is unsupported in this form (the model assumes no three-phase loads).
PhiVector phase_vector(PhaseLabel l);

// Magnitude form used by the time-averaged model: A -> (1,0,0,0),
// AB -> (1/sqrt3, -1/sqrt3, 0, 0), ABC -> (1/sqrt3, 1/sqrt3, 1/sqrt3, 0).
PhiVector magnitude_phase_vector(PhaseLabel l);

// Deterministic part of the measured magnitude: 1 for single-phase
// customers, sqrt(3) for two- and three-phase customers.
double g_value(PhaseLabel l);

enum class CouplingMode { physical, bound_consistent };
std::string to_string(CouplingMode m);
CouplingMode coupling_from_string(const std::string& s);

struct CircuitSpec {
  size_t n_customers = 0;
  double delta_e = 0.0;  // electrical spacing, per-unit
  double z_mag = 0.0;    // feeder impedance magnitude, per-unit
  double sigma = 0.0;    // current-magnitude std, per-unit
  std::vector<std::pair<PhaseLabel, double>> phase_mix;  // label -> probability
  CouplingMode coupling_mode = CouplingMode::physical;
  uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct VoltageDataset {
  size_t n_customers = 0;
  size_t n_timesteps = 0;
  Matrix voltages;  // n_customers x n_timesteps
  std::vector<PhaseLabel> labels;  // empty when unlabeled

  bool has_labels() const { return !labels.empty(); }
};

// Phase labels drawn i.i.d. from spec.phase_mix; deterministic per seed.
std::vector<PhaseLabel> draw_labels(const CircuitSpec& spec);

// Lower-triangular coupling factor C. In physical mode C[k][j] is the
// inner product of the magnitude phase vectors; in bound_consistent mode
// the diagonal is uniform in [1, 2/sqrt3] and the sub-diagonal entries are
// uniform in [1/sqrt3, 2/sqrt3] with random sign.
Matrix build_coupling_matrix(const std::vector<PhaseLabel>& labels,
                             CouplingMode mode, uint64_t seed);

// V = g - |z| dE C J I with J = diag(1..N) and I ~ iid Normal(1, sigma).
// Deterministic per (spec.seed); draws are indexed by (timestep, customer)
// so generation parallelizes across timesteps.
VoltageDataset sample_voltages(const CircuitSpec& spec, size_t n_timesteps);

// Sigma = alpha (CJ)(CJ)^T with alpha = |z|^2 dE^2 sigma^2.
SymMatrix theoretical_covariance(const CircuitSpec& spec,
                                 const std::vector<PhaseLabel>& labels);
SymMatrix theoretical_covariance(const CircuitSpec& spec, const Matrix& coupling);

}  // namespace phaseid::circuit
