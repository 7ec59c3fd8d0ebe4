// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "phaseid/circuit.hpp"
#include "phaseid/entropy.hpp"
#include "phaseid/selection.hpp"
#include "test_support.hpp"

using namespace phaseid;
using namespace phaseid::entropy;

TEST_CASE("feeder_entropy_bounds: n = 5000 reference values") {
  const EntropyBounds b = feeder_entropy_bounds(5000);
  CHECK(b.lower_nats == doctest::Approx(-7.5155).epsilon(1e-3));
  CHECK(b.upper_nats == doctest::Approx(-2.5145).epsilon(1e-3));
  CHECK(b.lower_bits() == doctest::Approx(-10.85).epsilon(2e-3));
  CHECK(b.upper_bits() == doctest::Approx(-3.62).epsilon(3e-3));
}

TEST_CASE("feeder_entropy_bounds: ordering and monotonicity") {
  CHECK(feeder_entropy_bounds(5000).upper_nats < feeder_entropy_bounds(500).upper_nats);
  for (size_t n = 2; n <= 1000000; n = n < 10 ? n + 1 : n * 3) {
    const EntropyBounds b = feeder_entropy_bounds(n);
    CHECK(b.lower_nats < b.upper_nats);
  }
  CHECK_THROWS_AS(feeder_entropy_bounds(1), OutOfRange);
}

TEST_CASE("scale_to_unit_diagonal") {
  CHECK(testsup::max_abs_diff(scale_to_unit_diagonal(SymMatrix::identity(4)),
                              SymMatrix::identity(4)) == 0.0);
  CHECK(testsup::max_abs_diff(scale_to_unit_diagonal(SymMatrix::diag({4.0, 9.0})),
                              SymMatrix::identity(2)) < 1e-15);
  SymMatrix s(2);
  s.set(0, 0, 4.0);
  s.set(1, 1, 9.0);
  s.set(0, 1, 3.0);  // rho = 3 / (2*3) = 0.5
  const SymMatrix t = scale_to_unit_diagonal(s);
  CHECK(t(0, 0) == 1.0);
  CHECK(t(1, 1) == 1.0);
  CHECK(t(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(scale_to_unit_diagonal(SymMatrix::diag({1.0, 0.0})), ZeroDiagonal);
}

TEST_CASE("gaussian_entropy: closed forms") {
  const double unit = 0.5 * std::log(2.0 * 3.14159265358979323846 * std::exp(1.0));
  CHECK(gaussian_entropy(SymMatrix::identity(1)) == doctest::Approx(unit).epsilon(1e-9));
  CHECK(gaussian_entropy(SymMatrix::identity(6)) ==
        doctest::Approx(6.0 * unit).epsilon(1e-9));
  // near-singular pair is far below independence
  SymMatrix rho(2);
  rho.set(0, 0, 1.0);
  rho.set(1, 1, 1.0);
  rho.set(0, 1, 0.9999);
  const double expect = 2.0 * unit + 0.5 * std::log(1.0 - 0.9999 * 0.9999);
  CHECK(gaussian_entropy(rho) == doctest::Approx(expect).epsilon(1e-6));
  CHECK(gaussian_entropy(rho) < 2.0 * unit - 3.0);
}

TEST_CASE("gaussian_entropy: hadamard maximum at the identity") {
  const double unit = 0.5 * std::log(2.0 * 3.14159265358979323846 * std::exp(1.0));
  for (uint64_t t = 0; t < 10; ++t) {
    const SymMatrix raw = testsup::random_spd(6, 4000 + t);
    const SymMatrix tilde = scale_to_unit_diagonal(raw);
    CHECK(gaussian_entropy(tilde) <= 6.0 * unit + 1e-9);
  }
}

TEST_CASE("fano_expression") {
  CHECK(fano_expression(0.0, 3) == 0.0);
  CHECK(fano_expression(0.5, 2) == doctest::Approx(1.0));
  CHECK(fano_expression(0.5, 5) == doctest::Approx(2.0));
  CHECK(fano_expression(1.0, 2) == doctest::Approx(0.0));
  CHECK_THROWS_AS(fano_expression(-0.1, 2), OutOfRange);
  CHECK_THROWS_AS(fano_expression(1.1, 2), OutOfRange);
  CHECK_THROWS_AS(fano_expression(0.5, 1), OutOfRange);
}

TEST_CASE("delta_bound_term: identity kernel and monotonicity") {
  const SymMatrix k = SymMatrix::identity(8);
  const IndexSet s = IndexSet::of({0, 1, 2});
  CHECK(delta_bound_term(k, s, 1.0) == doctest::Approx(5.0 / 8.0));
  CHECK(delta_bound_term(k, s, 0.0) == 0.0);
  CHECK(delta_bound_term(k, s, 0.25) < delta_bound_term(k, s, 0.5));
  CHECK_THROWS_AS(delta_bound_term(k, s, 1.5), OutOfRange);
}

TEST_CASE("delta_bound_term: exhaustive selection below random") {
  for (uint64_t t = 0; t < 5; ++t) {
    const SymMatrix k = testsup::random_cosine_kernel(10, 20, 6000 + t);
    const auto best = selection::select_exhaustive(k, 3);
    const auto rnd = selection::select_random(k, 3, 9000 + t);
    CHECK(delta_bound_term(k, best.indices, 0.5) <=
          delta_bound_term(k, rnd.indices, 0.5) + 1e-12);
  }
}

TEST_CASE("delta_bound_term: permutation invariance") {
  const SymMatrix k = testsup::random_cosine_kernel(8, 16, 11);
  const IndexSet s = IndexSet::of({1, 5});
  const std::vector<size_t> p{5, 2, 7, 0, 3, 6, 1, 4};
  SymMatrix kp(8);
  for (size_t i = 0; i < 8; ++i)
    for (size_t j = 0; j <= i; ++j) kp.set(i, j, k(p[i], p[j]));
  // map s through the inverse permutation
  std::vector<size_t> sp;
  for (size_t i = 0; i < 8; ++i)
    if (p[i] == 1 || p[i] == 5) sp.push_back(i);
  std::sort(sp.begin(), sp.end());
  CHECK(delta_bound_term(k, s, 0.7) ==
        doctest::Approx(delta_bound_term(kp, IndexSet::of(sp), 0.7)).epsilon(1e-10));
}

TEST_CASE("entropy containment measured against the closed-form bounds") {
  // The closed-form constants sit well below the realized per-customer
  // entropy of bound-consistent covariances (see the acceptance suite for
  // the pinned check); here we pin the measured gap so regressions in
  // either side show up.
  circuit::CircuitSpec spec;
  spec.n_customers = 50;
  spec.delta_e = 1.0;
  spec.z_mag = 1.0;
  spec.sigma = 1.0;
  spec.phase_mix = {{circuit::PhaseLabel::A, 1.0}};
  spec.coupling_mode = circuit::CouplingMode::bound_consistent;
  spec.seed = 5;
  const auto labels = circuit::draw_labels(spec);
  const SymMatrix sigma = circuit::theoretical_covariance(spec, labels);
  const double per_customer =
      gaussian_entropy(scale_to_unit_diagonal(sigma)) / 50.0;
  const EntropyBounds b = feeder_entropy_bounds(50);
  CHECK(per_customer > b.lower_nats);   // lower bound holds comfortably
  CHECK(per_customer > b.upper_nats);   // upper bound does not (known gap)
  CHECK(per_customer - b.upper_nats > 0.4);
  CHECK(per_customer - b.upper_nats < 1.2);
}

TEST_CASE("report rendering") {
  const EntropyReport r = make_report(100, 3.5, "check");
  const std::string text = r.to_text();
  CHECK(text.find("n=100") != std::string::npos);
  CHECK(text.find("gaussian_entropy_nats=3.5") != std::string::npos);
  CHECK(text.find("notes=check") != std::string::npos);
  CHECK(text.find("per_customer_lower_bits=") != std::string::npos);
}
