// SPDX-License-Identifier: Apache-2.0
#include "phaseid/circuit.hpp"

#include <cmath>

#include "phaseid/rng.hpp"

namespace phaseid::circuit {

namespace {
const double kInvSqrt3 = 1.0 / std::sqrt(3.0);
const double kSqrt3 = std::sqrt(3.0);
}  // namespace

std::string to_string(PhaseLabel l) {
  switch (l) {
    case PhaseLabel::A: return "A";
    case PhaseLabel::B: return "B";
    case PhaseLabel::C: return "C";
    case PhaseLabel::AB: return "AB";
    case PhaseLabel::BC: return "BC";
    case PhaseLabel::CA: return "CA";
    case PhaseLabel::ABC: return "ABC";
  }
  throw UnknownLabel("to_string: bad PhaseLabel value");
}

PhaseLabel phase_from_string(const std::string& s) {
  if (s == "A") return PhaseLabel::A;
  if (s == "B") return PhaseLabel::B;
  if (s == "C") return PhaseLabel::C;
  if (s == "AB") return PhaseLabel::AB;
  if (s == "BC") return PhaseLabel::BC;
  if (s == "CA") return PhaseLabel::CA;
  if (s == "ABC") return PhaseLabel::ABC;
  throw UnknownLabel("unknown phase label: '" + s + "'");
}

bool is_single_phase(PhaseLabel l) {
  return l == PhaseLabel::A || l == PhaseLabel::B || l == PhaseLabel::C;
}

bool is_two_phase(PhaseLabel l) {
  return l == PhaseLabel::AB || l == PhaseLabel::BC || l == PhaseLabel::CA;
}

double inner(const PhiVector& a, const PhiVector& b) {
  double s = 0.0;
  for (size_t i = 0; i < 4; ++i) s += a.v[i] * b.v[i];
  return s;
}

PhiVector phase_vector(PhaseLabel l) {
  switch (l) {
    case PhaseLabel::A: return {{1, 0, 0, -1}};
    case PhaseLabel::B: return {{0, 1, 0, -1}};
    case PhaseLabel::C: return {{0, 0, 1, -1}};
    case PhaseLabel::AB: return {{1, -1, 0, 0}};
    case PhaseLabel::BC: return {{0, 1, -1, 0}};
    case PhaseLabel::CA: return {{-1, 0, 1, 0}};
    case PhaseLabel::ABC:
      throw UnsupportedLabel("phase_vector: no three-phase loads in the model");
  }
  throw UnknownLabel("phase_vector: bad PhaseLabel value");
}

PhiVector magnitude_phase_vector(PhaseLabel l) {
  switch (l) {
    case PhaseLabel::A: return {{1, 0, 0, 0}};
    case PhaseLabel::B: return {{0, 1, 0, 0}};
    case PhaseLabel::C: return {{0, 0, 1, 0}};
    case PhaseLabel::AB: return {{kInvSqrt3, -kInvSqrt3, 0, 0}};
    case PhaseLabel::BC: return {{0, kInvSqrt3, -kInvSqrt3, 0}};
    case PhaseLabel::CA: return {{-kInvSqrt3, 0, kInvSqrt3, 0}};
    case PhaseLabel::ABC: return {{kInvSqrt3, kInvSqrt3, kInvSqrt3, 0}};
  }
  throw UnknownLabel("magnitude_phase_vector: bad PhaseLabel value");
}

double g_value(PhaseLabel l) { return is_single_phase(l) ? 1.0 : kSqrt3; }

std::string to_string(CouplingMode m) {
  return m == CouplingMode::physical ? "physical" : "bound_consistent";
}

CouplingMode coupling_from_string(const std::string& s) {
  if (s == "physical") return CouplingMode::physical;
  if (s == "bound_consistent") return CouplingMode::bound_consistent;
  throw ConfigError("unknown coupling mode: '" + s + "'");
}

void CircuitSpec::validate() const {
  if (n_customers < 2) throw ConfigError("circuit: n_customers must be >= 2");
  if (delta_e <= 0.0) throw ConfigError("circuit: delta_e must be positive");
  if (z_mag <= 0.0) throw ConfigError("circuit: z_mag must be positive");
  if (sigma <= 0.0) throw ConfigError("circuit: sigma must be positive");
  if (phase_mix.empty()) throw ConfigError("circuit: phase_mix is empty");
  double total = 0.0;
  for (const auto& [label, p] : phase_mix) {
    (void)label;
    if (p < 0.0) throw ConfigError("circuit: negative phase probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ConfigError("circuit: phase_mix probabilities must sum to 1");
}

std::vector<PhaseLabel> draw_labels(const CircuitSpec& spec) {
  spec.validate();
  std::vector<PhaseLabel> labels(spec.n_customers);
  for (size_t c = 0; c < spec.n_customers; ++c) {
    const double u = rng::u01(spec.seed, rng::kStreamLabels, c);
    double acc = 0.0;
    PhaseLabel chosen = spec.phase_mix.back().first;
    for (const auto& [label, p] : spec.phase_mix) {
      acc += p;
      if (u <= acc) {
        chosen = label;
        break;
      }
    }
    labels[c] = chosen;
  }
  return labels;
}

Matrix build_coupling_matrix(const std::vector<PhaseLabel>& labels,
                             CouplingMode mode, uint64_t seed) {
  if (labels.empty()) throw BadCardinality("build_coupling_matrix: no labels");
  const size_t n = labels.size();
  Matrix c(n, n);
  if (mode == CouplingMode::physical) {
    std::vector<PhiVector> phi(n);
    for (size_t i = 0; i < n; ++i) phi[i] = magnitude_phase_vector(labels[i]);
    for (size_t k = 0; k < n; ++k)
      for (size_t j = 0; j <= k; ++j) c(k, j) = inner(phi[k], phi[j]);
  } else {
    // Ranges: diagonal in [1, 2/sqrt3], sub-diagonal magnitudes in
    // [1/sqrt3, 2/sqrt3] with random sign.
    for (size_t k = 0; k < n; ++k) {
      for (size_t j = 0; j < k; ++j) {
        const double mag = kInvSqrt3 +
            kInvSqrt3 * rng::u01(seed, rng::kStreamCoupling, k, j, 0);
        const double sign = rng::u01(seed, rng::kStreamCoupling, k, j, 1) < 0.5 ? -1.0 : 1.0;
        c(k, j) = sign * mag;
      }
      c(k, k) = 1.0 + (2.0 * kInvSqrt3 - 1.0) *
          rng::u01(seed, rng::kStreamCoupling, k, k, 0);
    }
  }
  return c;
}

VoltageDataset sample_voltages(const CircuitSpec& spec, size_t n_timesteps) {
  spec.validate();
  const size_t n = spec.n_customers;
  VoltageDataset out;
  out.n_customers = n;
  out.n_timesteps = n_timesteps;
  out.labels = draw_labels(spec);
  out.voltages = Matrix(n, n_timesteps);

  const Matrix c = build_coupling_matrix(out.labels, spec.coupling_mode, spec.seed);
  const double scale = spec.z_mag * spec.delta_e;

  std::vector<double> g(n);
  for (size_t k = 0; k < n; ++k) g[k] = g_value(out.labels[k]);

  // V(t) = g - |z| dE C J I(t). C J is lower triangular, so accumulate the
  // weighted currents once per timestep and take prefix combinations.
#pragma omp parallel for schedule(static)
  for (long long tt = 0; tt < static_cast<long long>(n_timesteps); ++tt) {
    const size_t t = static_cast<size_t>(tt);
    std::vector<double> wi(n);  // j * I_j(t)
    for (size_t j = 0; j < n; ++j) {
      const double current = 1.0 +
          spec.sigma * rng::normal(spec.seed, rng::kStreamCurrents, t, j);
      wi[j] = static_cast<double>(j + 1) * current;
    }
    for (size_t k = 0; k < n; ++k) {
      double drop = 0.0;
      const double* ck = c.row(k);
      for (size_t j = 0; j <= k; ++j) drop += ck[j] * wi[j];
      out.voltages(k, t) = g[k] - scale * drop;
    }
  }
  return out;
}

SymMatrix theoretical_covariance(const CircuitSpec& spec,
                                 const std::vector<PhaseLabel>& labels) {
  return theoretical_covariance(
      spec, build_coupling_matrix(labels, spec.coupling_mode, spec.seed));
}

SymMatrix theoretical_covariance(const CircuitSpec& spec, const Matrix& coupling) {
  const size_t n = coupling.rows;
  const double alpha = spec.z_mag * spec.z_mag * spec.delta_e * spec.delta_e *
                       spec.sigma * spec.sigma;
  // (CJ)(CJ)^T
  Matrix cj = coupling;
  for (size_t k = 0; k < n; ++k)
    for (size_t j = 0; j < n; ++j) cj(k, j) *= static_cast<double>(j + 1);
  Matrix prod = matmul_nt(cj, cj);
  SymMatrix out(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j <= i; ++j)
      out.set(i, j, alpha * 0.5 * (prod(i, j) + prod(j, i)));
  return out;
}

}  // namespace phaseid::circuit
