// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "phaseid/circuit.hpp"
#include "phaseid/rng.hpp"
#include "test_support.hpp"

using namespace phaseid;
using namespace phaseid::circuit;

namespace {

CircuitSpec basic_spec(size_t n, uint64_t seed, double sigma = 0.2) {
  CircuitSpec spec;
  spec.n_customers = n;
  spec.delta_e = 1.0;
  spec.z_mag = 1.0;
  spec.sigma = sigma;
  spec.phase_mix = {{PhaseLabel::A, 1.0}};
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("phase_vector: raw phasor forms") {
  CHECK(phase_vector(PhaseLabel::A).v == std::array<double, 4>{1, 0, 0, -1});
  CHECK(phase_vector(PhaseLabel::B).v == std::array<double, 4>{0, 1, 0, -1});
  CHECK(phase_vector(PhaseLabel::AB).v == std::array<double, 4>{1, -1, 0, 0});
  CHECK(phase_vector(PhaseLabel::CA).v == std::array<double, 4>{-1, 0, 1, 0});
  CHECK_THROWS_AS(phase_vector(PhaseLabel::ABC), UnsupportedLabel);
}

TEST_CASE("magnitude_phase_vector: values and inner products") {
  const double s = 1.0 / std::sqrt(3.0);
  CHECK(magnitude_phase_vector(PhaseLabel::A).v == std::array<double, 4>{1, 0, 0, 0});
  CHECK(magnitude_phase_vector(PhaseLabel::AB).v[0] == doctest::Approx(s));
  CHECK(magnitude_phase_vector(PhaseLabel::AB).v[1] == doctest::Approx(-s));
  CHECK(inner(magnitude_phase_vector(PhaseLabel::A),
              magnitude_phase_vector(PhaseLabel::AB)) == doctest::Approx(s));
  CHECK(inner(magnitude_phase_vector(PhaseLabel::A),
              magnitude_phase_vector(PhaseLabel::B)) == doctest::Approx(0.0));
  // norm of the magnitude form lies in [sqrt(2/3), 1]
  for (auto l : {PhaseLabel::A, PhaseLabel::B, PhaseLabel::C, PhaseLabel::AB,
                 PhaseLabel::BC, PhaseLabel::CA, PhaseLabel::ABC}) {
    const auto v = magnitude_phase_vector(l).v;
    const double norm = std::sqrt(v[0]*v[0] + v[1]*v[1] + v[2]*v[2] + v[3]*v[3]);
    CHECK(norm >= std::sqrt(2.0 / 3.0) - 1e-12);
    CHECK(norm <= 1.0 + 1e-12);
  }
}

TEST_CASE("g_value") {
  CHECK(g_value(PhaseLabel::A) == 1.0);
  CHECK(g_value(PhaseLabel::BC) == doctest::Approx(std::sqrt(3.0)));
  CHECK(g_value(PhaseLabel::ABC) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("build_coupling_matrix: physical values") {
  const Matrix same = build_coupling_matrix({PhaseLabel::A, PhaseLabel::A},
                                            CouplingMode::physical, 0);
  CHECK(same(0, 0) == 1.0);
  CHECK(same(1, 0) == 1.0);
  CHECK(same(1, 1) == 1.0);
  CHECK(same(0, 1) == 0.0);  // strictly lower triangular above diagonal

  const Matrix ortho = build_coupling_matrix({PhaseLabel::A, PhaseLabel::B},
                                             CouplingMode::physical, 0);
  CHECK(ortho(1, 0) == doctest::Approx(0.0));
  CHECK(ortho(1, 1) == 1.0);
}

TEST_CASE("build_coupling_matrix: bound_consistent ranges") {
  const double lo = 1.0 / std::sqrt(3.0), hi = 2.0 / std::sqrt(3.0);
  std::vector<PhaseLabel> labels(20, PhaseLabel::A);
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix c = build_coupling_matrix(labels, CouplingMode::bound_consistent, seed);
    for (size_t k = 0; k < 20; ++k) {
      CHECK(c(k, k) >= 1.0);
      CHECK(c(k, k) <= hi + 1e-12);
      for (size_t j = 0; j < k; ++j) {
        CHECK(std::abs(c(k, j)) >= lo - 1e-12);
        CHECK(std::abs(c(k, j)) <= hi + 1e-12);
      }
    }
  }
}

TEST_CASE("sample_voltages: deterministic sigma -> 0 limit") {
  CircuitSpec spec = basic_spec(4, 9, 1e-12);
  const VoltageDataset data = sample_voltages(spec, 6);
  // expected: g - |z| dE C J 1 with all-A coupling (prefix sums of j)
  for (size_t t = 0; t < 6; ++t) {
    double acc = 0.0;
    for (size_t k = 0; k < 4; ++k) {
      acc += static_cast<double>(k + 1);
      CHECK(data.voltages(k, t) == doctest::Approx(1.0 - acc).epsilon(1e-8));
    }
  }
}

TEST_CASE("sample_voltages: variance grows along the feeder") {
  CircuitSpec spec = basic_spec(3, 17, 0.3);
  spec.delta_e = 0.01;
  const size_t T = 50000;
  const VoltageDataset data = sample_voltages(spec, T);
  auto variance = [&](size_t k) {
    double mu = 0.0;
    for (size_t t = 0; t < T; ++t) mu += data.voltages(k, t);
    mu /= static_cast<double>(T);
    double v = 0.0;
    for (size_t t = 0; t < T; ++t) {
      const double d = data.voltages(k, t) - mu;
      v += d * d;
    }
    return v / static_cast<double>(T);
  };
  const double v1 = variance(0), v3 = variance(2);
  CHECK(v3 > v1);
  // all-A circuit: Var_k / alpha = sum_{j<=k} j^2
  const double alpha = std::pow(spec.z_mag * spec.delta_e * spec.sigma, 2);
  CHECK(v1 == doctest::Approx(alpha * 1.0).epsilon(0.05));
  CHECK(v3 == doctest::Approx(alpha * 14.0).epsilon(0.05));
}

TEST_CASE("sample_voltages: bit-identical for equal spec and seed") {
  CircuitSpec spec = basic_spec(6, 123);
  spec.phase_mix = {{PhaseLabel::A, 0.5}, {PhaseLabel::B, 0.5}};
  const VoltageDataset a = sample_voltages(spec, 20);
  const VoltageDataset b = sample_voltages(spec, 20);
  CHECK(a.voltages.a == b.voltages.a);
  CHECK(a.labels == b.labels);
  spec.seed = 124;
  const VoltageDataset c = sample_voltages(spec, 20);
  CHECK(a.voltages.a != c.voltages.a);
}

TEST_CASE("theoretical_covariance: closed forms") {
  {
    CircuitSpec spec = basic_spec(2, 5, 1.0);
    std::vector<PhaseLabel> labels{PhaseLabel::A};
    Matrix c(1, 1);
    c(0, 0) = 1.0;
    const SymMatrix sigma = theoretical_covariance(spec, c);
    CHECK(sigma(0, 0) == doctest::Approx(1.0));
  }
  {
    CircuitSpec spec = basic_spec(2, 5, 1.0);
    const SymMatrix sigma =
        theoretical_covariance(spec, std::vector<PhaseLabel>{PhaseLabel::A, PhaseLabel::A});
    CHECK(sigma(0, 0) == doctest::Approx(1.0));
    CHECK(sigma(0, 1) == doctest::Approx(1.0));
    CHECK(sigma(1, 1) == doctest::Approx(5.0));
  }
}

TEST_CASE("theoretical_covariance: monte-carlo agreement") {
  CircuitSpec spec = basic_spec(4, 31, 0.25);
  spec.delta_e = 0.05;
  spec.phase_mix = {{PhaseLabel::A, 0.6}, {PhaseLabel::B, 0.4}};
  const size_t T = 100000;
  const VoltageDataset data = sample_voltages(spec, T);
  const SymMatrix sigma = theoretical_covariance(spec, data.labels);

  std::vector<double> mu(4, 0.0);
  for (size_t k = 0; k < 4; ++k) {
    for (size_t t = 0; t < T; ++t) mu[k] += data.voltages(k, t);
    mu[k] /= static_cast<double>(T);
  }
  SymMatrix sample(4);
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (size_t t = 0; t < T; ++t)
        s += (data.voltages(i, t) - mu[i]) * (data.voltages(j, t) - mu[j]);
      sample.set(i, j, s / static_cast<double>(T));
    }
  CHECK(relative_frobenius_distance(sample, sigma) < 0.05);
}

TEST_CASE("invariant: diagonal growth band in bound_consistent mode") {
  CircuitSpec spec = basic_spec(12, 77);
  spec.coupling_mode = CouplingMode::bound_consistent;
  const std::vector<PhaseLabel> labels(12, PhaseLabel::A);
  const Matrix c = build_coupling_matrix(labels, spec.coupling_mode, spec.seed);
  const SymMatrix sigma = theoretical_covariance(spec, c);
  const double alpha = std::pow(spec.z_mag * spec.delta_e * spec.sigma, 2);
  for (size_t k = 0; k < 12; ++k) {
    const double kk = static_cast<double>(k + 1);
    const double s = kk * (kk + 1.0) * (2.0 * kk + 1.0) / 6.0;
    const double ratio = sigma(k, k) / alpha;
    CHECK(ratio >= s / 3.0 - 1e-9);
    CHECK(ratio <= 4.0 * s / 3.0 + 1e-9);
  }
}

TEST_CASE("invariant: voltages affine in the current draws") {
  CircuitSpec spec = basic_spec(5, 999, 0.1);
  const VoltageDataset base = sample_voltages(spec, 16);
  CircuitSpec doubled = spec;
  doubled.sigma = 0.2;
  const VoltageDataset twice = sample_voltages(doubled, 16);
  // sigma -> 0 limit gives the deterministic part
  CircuitSpec det = spec;
  det.sigma = 1e-13;
  const VoltageDataset det_part = sample_voltages(det, 16);
  for (size_t i = 0; i < base.voltages.a.size(); ++i) {
    const double lhs = twice.voltages.a[i] - det_part.voltages.a[i];
    const double rhs = 2.0 * (base.voltages.a[i] - det_part.voltages.a[i]);
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
}

TEST_CASE("invariant: label marginals follow the mix (chi-square)") {
  CircuitSpec spec = basic_spec(10000, 2024);
  spec.phase_mix = {{PhaseLabel::A, 0.2}, {PhaseLabel::B, 0.3}, {PhaseLabel::C, 0.5}};
  const auto labels = draw_labels(spec);
  std::map<PhaseLabel, size_t> count;
  for (auto l : labels) ++count[l];
  double chi2 = 0.0;
  for (const auto& [label, p] : spec.phase_mix) {
    const double expected = p * 10000.0;
    const double observed = static_cast<double>(count[label]);
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  // df = 2, p > 0.01 means chi2 below the 0.99 quantile 9.2103
  CHECK(chi2 < 9.2103);
}

TEST_CASE("spec validation") {
  CircuitSpec spec = basic_spec(4, 1);
  spec.phase_mix = {{PhaseLabel::A, 0.6}, {PhaseLabel::B, 0.5}};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.phase_mix = {{PhaseLabel::A, 1.0}};
  spec.n_customers = 1;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("label serialization round trip") {
  for (auto l : {PhaseLabel::A, PhaseLabel::B, PhaseLabel::C, PhaseLabel::AB,
                 PhaseLabel::BC, PhaseLabel::CA, PhaseLabel::ABC})
    CHECK(phase_from_string(to_string(l)) == l);
  CHECK_THROWS_AS(phase_from_string("D"), UnknownLabel);
}
