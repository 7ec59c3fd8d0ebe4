// SPDX-License-Identifier: Apache-2.0
//
// Times the OpenMP kernels against the serial reference implementations.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "phaseid/circuit.hpp"
#include "phaseid/numerics.hpp"
#include "phaseid/preprocess.hpp"
#include "phaseid/reference.hpp"
#include "phaseid/rng.hpp"
#include "phaseid/selection.hpp"

namespace {

using namespace phaseid;
using Clock = std::chrono::steady_clock;

template <typename F>
double time_best_of(F&& f, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    if (s < best) best = s;
  }
  return best;
}

void report(const std::string& name, double serial, double parallel) {
  std::printf("%-28s serial %9.4fs   parallel %9.4fs   speedup %5.2fx\n",
              name.c_str(), serial, parallel, serial / parallel);
}

SymMatrix random_spd(size_t n, uint64_t seed) {
  Matrix g(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      g(i, j) = rng::normal(seed, rng::kStreamTest, i, j);
  Matrix gg = matmul_nt(g, g);
  SymMatrix m(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j <= i; ++j)
      m.set(i, j, gg(i, j) / static_cast<double>(n) + (i == j ? 1.0 : 0.0));
  return m;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled at build time\n");
#endif

  {
    const size_t n = 384;
    Matrix a(n, n), b(n, n);
    for (size_t i = 0; i < n * n; ++i) {
      a.a[i] = rng::u01(1, rng::kStreamTest, i);
      b.a[i] = rng::u01(2, rng::kStreamTest, i);
    }
    Matrix out;
    const double ts = time_best_of([&] { out = ref::matmul(a, b); });
    const double tp = time_best_of([&] { out = matmul(a, b); });
    report("matmul " + std::to_string(n), ts, tp);
  }
  {
    const size_t n = 384;
    const SymMatrix m = random_spd(n, 7);
    Matrix out;
    const double ts = time_best_of([&] { out = ref::cholesky(m); });
    const double tp = time_best_of([&] { out = numerics::cholesky(m); });
    report("cholesky " + std::to_string(n), ts, tp);
  }
  {
    const size_t n = 256;
    const SymMatrix m = random_spd(n, 8);
    const double ts = time_best_of([&] { (void)ref::gauss_inverse(m.to_matrix()); });
    const double tp = time_best_of([&] { (void)numerics::invert_spd(m); });
    report("inverse " + std::to_string(n), ts, tp);
  }
  {
    const size_t n = 320;
    const SymMatrix m = random_spd(n, 9);
    std::vector<size_t> idx;
    for (size_t i = 0; i < n; i += 10) idx.push_back(i);
    const IndexSet s = IndexSet::of(idx);
    const double ts = time_best_of([&] { (void)ref::schur_by_elimination(m, s); });
    const double tp = time_best_of([&] { (void)numerics::schur_complement(m, s); });
    report("schur " + std::to_string(n) + " |S|=" + std::to_string(s.size()), ts, tp);
  }
  {
    circuit::CircuitSpec spec;
    spec.n_customers = 400;
    spec.delta_e = 0.001;
    spec.z_mag = 0.0008;
    spec.sigma = 0.2;
    spec.phase_mix = {{circuit::PhaseLabel::A, 0.5},
                      {circuit::PhaseLabel::B, 0.3},
                      {circuit::PhaseLabel::C, 0.2}};
    spec.seed = 11;
    circuit::VoltageDataset data;
    const double tp = time_best_of([&] { data = circuit::sample_voltages(spec, 336); });
    std::printf("%-28s parallel %9.4fs (counter-based draws)\n",
                "sample_voltages 400x336", tp);

    const auto prep = pipeline::preprocess(data);
    SymMatrix k;
    const double tk = time_best_of([&] { k = selection::cosine_kernel_matrix(prep, false); });
    std::printf("%-28s parallel %9.4fs\n", "cosine_kernel 400", tk);

    // Exhaustive sweep fans subsets across threads; bench a small kernel.
    SymMatrix k60(60);
    for (size_t i = 0; i < 60; ++i)
      for (size_t j = 0; j <= i; ++j) k60.set(i, j, k(i, j));
    const double te = time_best_of(
        [&] { (void)selection::select_exhaustive(k60, 3); }, 1);
    std::printf("%-28s parallel %9.4fs (C(60,3) subsets)\n", "exhaustive n=60 m=3", te);
  }
  return 0;
}
