// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "phaseid/numerics.hpp"
#include "phaseid/reference.hpp"
#include "phaseid/rng.hpp"
#include "phaseid/selection.hpp"
#include "test_support.hpp"

using namespace phaseid;
using namespace phaseid::selection;
using testsup::random_cosine_kernel;
using testsup::random_spd;

namespace {

circuit::VoltageDataset dataset_from_rows(const Matrix& rows) {
  circuit::VoltageDataset d;
  d.n_customers = rows.rows;
  d.n_timesteps = rows.cols;
  d.voltages = rows;
  return d;
}

}  // namespace

TEST_CASE("cosine_kernel_matrix: fixed values") {
  Matrix rows(3, 2);
  rows(0, 0) = 1.0; rows(0, 1) = 0.0;
  rows(1, 0) = 1.0; rows(1, 1) = 0.0;   // identical to row 0
  rows(2, 0) = 0.0; rows(2, 1) = 2.0;   // orthogonal
  const SymMatrix k = cosine_kernel_matrix(dataset_from_rows(rows), false);
  CHECK(k(0, 1) == doctest::Approx(1.0));
  CHECK(k(0, 2) == doctest::Approx(0.0));
  for (size_t i = 0; i < 3; ++i) CHECK(k(i, i) == 1.0);

  Matrix pair(2, 2);
  pair(0, 0) = 1.0; pair(0, 1) = 0.0;
  pair(1, 0) = 1.0; pair(1, 1) = 1.0;
  const SymMatrix k2 = cosine_kernel_matrix(dataset_from_rows(pair), false);
  CHECK(k2(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));

  Matrix zero(2, 2);
  zero(0, 0) = 1.0;
  CHECK_THROWS_AS(cosine_kernel_matrix(dataset_from_rows(zero), false), ZeroNormRow);
}

TEST_CASE("selection_objective: identity and block kernels") {
  CHECK(selection_objective(SymMatrix::identity(5), IndexSet::of({0, 1})) ==
        doctest::Approx(3.0));
  // block diagonal: selecting one full block leaves the other block intact
  SymMatrix k(4);
  k.set(0, 0, 1.0); k.set(1, 1, 1.0); k.set(0, 1, 0.5);
  k.set(2, 2, 2.0); k.set(3, 3, 3.0); k.set(2, 3, 0.25);
  CHECK(selection_objective(k, IndexSet::of({0, 1})) ==
        doctest::Approx(std::sqrt(2.0) + std::sqrt(3.0)));
}

TEST_CASE("selection_objective: gaussian-elimination oracle") {
  const SymMatrix k = random_spd(10, 62);
  const IndexSet s = IndexSet::of({0, 3, 7});
  const double via_elim =
      numerics::trace_elementwise_sqrt(ref::schur_by_elimination(k, s));
  CHECK(selection_objective(k, s) == doctest::Approx(via_elim).epsilon(1e-10));
}

TEST_CASE("select_inverse_schur: ties and fixed diagonals") {
  // identity kernel: all inverse diagonals equal, tie-break picks index 0
  const SelectionResult tie = select_inverse_schur(SymMatrix::identity(3), 1);
  CHECK(tie.indices.indices == std::vector<size_t>{0});

  // K = diag(d) has K^{-1} = diag(1/d); want inverse diagonal (0.5,3,2,0.7)
  const SymMatrix k = SymMatrix::diag({2.0, 1.0 / 3.0, 0.5, 1.0 / 0.7});
  const SelectionResult r = select_inverse_schur(k, 2);
  CHECK(r.indices.indices == std::vector<size_t>{0, 3});
  CHECK(r.method == Method::inverse_schur);
  CHECK(r.objective == doctest::Approx(selection_objective(k, r.indices)));
}

TEST_CASE("select_inverse_schur: exact on diagonal kernels") {
  // On a diagonal kernel K = diag(d), K^{-1} = diag(1/d), so the rule keeps
  // the largest-variance points and the complement holds the smallest
  // entries, which is the global optimum of the objective.
  const SymMatrix k = SymMatrix::diag({0.3, 2.0, 0.9, 4.0, 0.1, 1.5});
  const SelectionResult heur = select_inverse_schur(k, 2);
  const SelectionResult best = select_exhaustive(k, 2);
  CHECK(heur.indices.indices == std::vector<size_t>{1, 3});
  CHECK(heur.indices.indices == best.indices.indices);
  CHECK(heur.objective == doctest::Approx(best.objective));
}

TEST_CASE("select_greedy: equals exhaustive at m = 1") {
  const SymMatrix k = random_cosine_kernel(9, 18, 3);
  const SelectionResult g = select_greedy(k, 1);
  const SelectionResult e = select_exhaustive(k, 1);
  CHECK(g.indices.indices == e.indices.indices);
  CHECK(g.objective == doctest::Approx(e.objective));
}

TEST_CASE("select_greedy: identity kernel objective is n - m") {
  const SelectionResult r = select_greedy(SymMatrix::identity(7), 3);
  CHECK(r.objective == doctest::Approx(4.0));
}

TEST_CASE("select_greedy: never beats exhaustive") {
  for (uint64_t t = 0; t < 5; ++t) {
    const SymMatrix k = random_cosine_kernel(12, 20, 40 + t);
    const double greedy = select_greedy(k, 3).objective;
    const double best = select_exhaustive(k, 3).objective;
    CHECK(greedy >= best - 1e-10);
  }
}

TEST_CASE("select_exhaustive: guard and small cases") {
  CHECK_THROWS_AS(select_exhaustive(SymMatrix::identity(60), 10), TooLarge);
  const SelectionResult r = select_exhaustive(SymMatrix::identity(4), 1);
  CHECK(r.indices.indices == std::vector<size_t>{0});  // lexicographic tie
  // n = 6, m = 5: each subset leaves one point; objective sqrt of its
  // conditional variance, well defined for every choice
  const SymMatrix k = random_cosine_kernel(6, 12, 8);
  const SelectionResult r5 = select_exhaustive(k, 5);
  CHECK(r5.indices.size() == 5);
  for (size_t other = 0; other < 6; ++other) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < 6; ++i)
      if (i != other) idx.push_back(i);
    CHECK(r5.objective <= selection_objective(k, IndexSet::of(idx)) + 1e-12);
  }
}

TEST_CASE("select_facility_location: antipodal clusters and m = n") {
  Matrix rows(6, 2);
  // two clusters around (1, 0) and (-1, 0)
  for (size_t i = 0; i < 3; ++i) {
    rows(i, 0) = 1.0;
    rows(i, 1) = 0.01 * static_cast<double>(i);
    rows(i + 3, 0) = -1.0;
    rows(i + 3, 1) = -0.01 * static_cast<double>(i);
  }
  const auto d = dataset_from_rows(rows);
  const SelectionResult two = select_facility_location(d, 2);
  const bool first_low = two.indices.indices[0] < 3;
  const bool second_high = two.indices.indices[1] >= 3;
  CHECK(first_low);
  CHECK(second_high);

  const SelectionResult all = select_facility_location(d, 6);
  CHECK(all.indices.size() == 6);
}

TEST_CASE("select_facility_location: within 2x of the k-center optimum") {
  const size_t n = 12, m = 4;
  Matrix rows(n, 3);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < 3; ++j)
      rows(i, j) = rng::normal(99, rng::kStreamTest, i, j);
  const auto data = dataset_from_rows(rows);

  auto chord = [&](size_t a, size_t b) {
    double sa = 0, sb = 0, ab = 0;
    for (size_t j = 0; j < 3; ++j) {
      sa += rows(a, j) * rows(a, j);
      sb += rows(b, j) * rows(b, j);
      ab += rows(a, j) * rows(b, j);
    }
    return std::sqrt(std::max(2.0 - 2.0 * ab / std::sqrt(sa * sb), 0.0));
  };
  auto radius = [&](const std::vector<size_t>& centers) {
    double worst = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double best = 1e300;
      for (size_t c : centers) best = std::min(best, chord(i, c));
      worst = std::max(worst, best);
    }
    return worst;
  };

  // brute-force optimum over all C(12,4) center sets
  double opt = 1e300;
  std::vector<size_t> centers(m);
  for (size_t a = 0; a < n; ++a)
    for (size_t b = a + 1; b < n; ++b)
      for (size_t c = b + 1; c < n; ++c)
        for (size_t d2 = c + 1; d2 < n; ++d2)
          opt = std::min(opt, radius({a, b, c, d2}));

  const SelectionResult greedy = select_facility_location(data, m);
  CHECK(radius(greedy.indices.indices) <= 2.0 * opt + 1e-12);
}

TEST_CASE("select_random: determinism and full set") {
  const SymMatrix k = random_cosine_kernel(8, 16, 5);
  const SelectionResult a = select_random(k, 3, 42);
  const SelectionResult b = select_random(k, 3, 42);
  CHECK(a.indices.indices == b.indices.indices);
  CHECK(a.objective == b.objective);
  CHECK(random_index_set(5, 5, 7).indices == std::vector<size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("select_random: inclusion frequency close to m/n") {
  const size_t n = 10, m = 3, draws = 10000;
  std::vector<size_t> count(n, 0);
  for (uint64_t d = 0; d < draws; ++d)
    for (size_t i : random_index_set(n, m, d).indices) ++count[i];
  const double p = static_cast<double>(m) / static_cast<double>(n);
  const double sd = std::sqrt(p * (1 - p) * static_cast<double>(draws));
  for (size_t i = 0; i < n; ++i) {
    const double dev = std::abs(static_cast<double>(count[i]) - p * draws);
    CHECK(dev < 4.5 * sd);
  }
}

TEST_CASE("check_loewner_minimality: identity and random kernels") {
  CHECK(check_loewner_minimality(SymMatrix::identity(4), 1).holds);
  for (uint64_t t = 0; t < 10; ++t) {
    const SymMatrix k = random_cosine_kernel(8, 16, 900 + t);
    CHECK(check_loewner_minimality(k, 3).holds);
  }
  CHECK_THROWS_AS(check_loewner_minimality(random_spd(40, 1), 10), TooLarge);
}

TEST_CASE("check_loewner_minimality: diagonal kernel, maximizer is the smallest") {
  // K = diag(1,2,3): complements are entrywise comparable; the
  // inverse-trace maximizer keeps the smallest entries.
  const SymMatrix k = SymMatrix::diag({1.0, 2.0, 3.0});
  const auto rep = check_loewner_minimality(k, 1);
  CHECK(rep.holds);
  CHECK(rep.maximizer.indices == std::vector<size_t>{2});
}

TEST_CASE("invariant: exhaustive objective non-increasing in m") {
  const SymMatrix k = random_cosine_kernel(9, 18, 1234);
  double prev = 1e300;
  for (size_t m = 1; m <= 5; ++m) {
    const double obj = select_exhaustive(k, m).objective;
    CHECK(obj <= prev + 1e-12);
    prev = obj;
  }
}

TEST_CASE("invariant: objective equals the block-inverse route") {
  const SymMatrix k = random_cosine_kernel(10, 20, 4321);
  const IndexSet s = IndexSet::of({1, 4, 8});
  const SymMatrix k_inv = numerics::invert_spd(k);
  const IndexSet u = s.complement(10);
  SymMatrix u_block(u.size());
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = 0; j <= i; ++j)
      u_block.set(i, j, k_inv(u.indices[i], u.indices[j]));
  const double via_inverse =
      numerics::trace_elementwise_sqrt(numerics::invert_spd(u_block));
  CHECK(selection_objective(k, s) == doctest::Approx(via_inverse).epsilon(1e-6));
}

TEST_CASE("invariant: inverse_schur equivariant under permutation") {
  const SymMatrix k = random_cosine_kernel(9, 18, 777);
  // permute rows/cols by p
  const std::vector<size_t> p{3, 1, 4, 0, 8, 6, 7, 2, 5};
  SymMatrix kp(9);
  for (size_t i = 0; i < 9; ++i)
    for (size_t j = 0; j <= i; ++j) kp.set(i, j, k(p[i], p[j]));
  const auto base = select_inverse_schur(k, 3).indices.indices;
  const auto perm = select_inverse_schur(kp, 3).indices.indices;
  std::vector<size_t> mapped;
  for (size_t i : perm) mapped.push_back(p[i]);
  std::sort(mapped.begin(), mapped.end());
  CHECK(mapped == base);
}

TEST_CASE("invariant: heuristic and greedy never beat exhaustive") {
  for (uint64_t t = 0; t < 5; ++t) {
    const SymMatrix k = random_cosine_kernel(10, 20, 2500 + t);
    const double best = select_exhaustive(k, 3).objective;
    CHECK(select_inverse_schur(k, 3).objective >= best - 1e-10);
    CHECK(select_greedy(k, 3).objective >= best - 1e-10);
  }
}

TEST_CASE("selection record round trip") {
  const SymMatrix k = random_cosine_kernel(8, 16, 31);
  const SelectionResult r = select_inverse_schur(k, 3);
  const SelectionResult back = selection_from_record(to_record(r));
  CHECK(back.indices.indices == r.indices.indices);
  CHECK(back.objective == r.objective);  // %.17g is exact
  CHECK(back.method == r.method);
  CHECK_THROWS_AS(selection_from_record("inverse_schur 3 0.5 0.0 1 2"), ParseError);
  CHECK_THROWS_AS(selection_from_record("bogus 1 0.5 0.0 1"), ConfigError);
}

TEST_CASE("cardinality guards") {
  const SymMatrix k = SymMatrix::identity(4);
  CHECK_THROWS_AS(select_inverse_schur(k, 0), BadCardinality);
  CHECK_THROWS_AS(select_inverse_schur(k, 4), BadCardinality);
  CHECK_THROWS_AS(select_greedy(k, 5), BadCardinality);
}
