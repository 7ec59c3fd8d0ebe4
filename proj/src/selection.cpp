// SPDX-License-Identifier: Apache-2.0
#include "phaseid/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "phaseid/numerics.hpp"
#include "phaseid/preprocess.hpp"
#include "phaseid/rng.hpp"

namespace phaseid::selection {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_cardinality(size_t n, size_t m) {
  if (m < 1 || m >= n)
    throw BadCardinality("selection: need 1 <= m < n, got m=" + std::to_string(m) +
                         " n=" + std::to_string(n));
}

double binomial(size_t n, size_t m) {
  double r = 1.0;
  for (size_t i = 0; i < m; ++i) r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return r;
}

bool next_combination(std::vector<size_t>& c, size_t n) {
  const size_t m = c.size();
  size_t i = m;
  while (i-- > 0) {
    if (c[i] != i + n - m) {
      ++c[i];
      for (size_t j = i + 1; j < m; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::inverse_schur: return "inverse_schur";
    case Method::greedy: return "greedy";
    case Method::exhaustive: return "exhaustive";
    case Method::facility: return "facility";
    case Method::random: return "random";
  }
  throw OutOfRange("to_string: bad Method value");
}

Method method_from_string(const std::string& s) {
  if (s == "inverse_schur") return Method::inverse_schur;
  if (s == "greedy") return Method::greedy;
  if (s == "exhaustive") return Method::exhaustive;
  if (s == "facility") return Method::facility;
  if (s == "random") return Method::random;
  throw ConfigError("unknown selection method: '" + s + "'");
}

std::string to_record(const SelectionResult& r) {
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", r.objective);
  os << to_string(r.method) << ' ' << r.indices.size() << ' ' << buf;
  std::snprintf(buf, sizeof buf, "%.6g", r.runtime_seconds);
  os << ' ' << buf;
  for (size_t i : r.indices.indices) os << ' ' << i;
  return os.str();
}

SelectionResult selection_from_record(const std::string& line) {
  std::istringstream is(line);
  std::string method;
  size_t m = 0;
  SelectionResult r;
  if (!(is >> method >> m >> r.objective >> r.runtime_seconds))
    throw ParseError("selection record: malformed header fields");
  r.method = method_from_string(method);
  std::vector<size_t> idx;
  size_t v;
  while (is >> v) idx.push_back(v);
  if (idx.size() != m)
    throw ParseError("selection record: index count does not match m");
  r.indices = IndexSet::of(std::move(idx));
  return r;
}

SymMatrix cosine_kernel_matrix(const VoltageDataset& data, bool apply_preprocessing) {
  const VoltageDataset rows = apply_preprocessing ? pipeline::preprocess(data) : data;
  const size_t n = rows.n_customers, d = rows.n_timesteps;
  std::vector<double> inv_norm(n);
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) s += rows.voltages(i, j) * rows.voltages(i, j);
    if (s <= 0.0)
      throw ZeroNormRow("cosine_kernel_matrix: zero-norm row " + std::to_string(i));
    inv_norm[i] = 1.0 / std::sqrt(s);
  }
  SymMatrix k(n);
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
    const size_t i = static_cast<size_t>(ii);
    const double* xi = rows.voltages.row(i);
    for (size_t j = 0; j <= i; ++j) {
      const double* xj = rows.voltages.row(j);
      double s = 0.0;
      for (size_t t = 0; t < d; ++t) s += xi[t] * xj[t];
      const double v = i == j ? 1.0 : s * inv_norm[i] * inv_norm[j];
      k.a[i * n + j] = v;
      k.a[j * n + i] = v;
    }
  }
  return k;
}

double selection_objective(const SymMatrix& k, const IndexSet& s) {
  return numerics::trace_elementwise_sqrt(numerics::schur_complement(k, s));
}

SelectionResult select_inverse_schur(const SymMatrix& k, size_t m) {
  const auto start = Clock::now();
  check_cardinality(k.n, m);
  const SymMatrix inv = numerics::invert_spd(k);
  std::vector<size_t> order(k.n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return inv(a, a) < inv(b, b); });
  std::vector<size_t> chosen(order.begin(), order.begin() + m);
  std::sort(chosen.begin(), chosen.end());

  SelectionResult r;
  r.indices = IndexSet::of(std::move(chosen));
  r.method = Method::inverse_schur;
  r.objective = selection_objective(k, r.indices);
  r.runtime_seconds = seconds_since(start);
  return r;
}

SelectionResult select_greedy(const SymMatrix& k, size_t m) {
  const auto start = Clock::now();
  check_cardinality(k.n, m);
  std::vector<size_t> chosen;
  double best_obj = 0.0;
  for (size_t round = 0; round < m; ++round) {
    size_t best_c = k.n;
    best_obj = 0.0;
    for (size_t c = 0; c < k.n; ++c) {
      if (std::binary_search(chosen.begin(), chosen.end(), c)) continue;
      std::vector<size_t> trial = chosen;
      trial.insert(std::lower_bound(trial.begin(), trial.end(), c), c);
      const double obj = selection_objective(k, IndexSet::of(std::move(trial)));
      if (best_c == k.n || obj < best_obj) {
        best_c = c;
        best_obj = obj;
      }
    }
    chosen.insert(std::lower_bound(chosen.begin(), chosen.end(), best_c), best_c);
  }
  SelectionResult r;
  r.indices = IndexSet::of(std::move(chosen));
  r.method = Method::greedy;
  r.objective = best_obj;
  r.runtime_seconds = seconds_since(start);
  return r;
}

SelectionResult select_exhaustive(const SymMatrix& k, size_t m) {
  const auto start = Clock::now();
  check_cardinality(k.n, m);
  if (binomial(k.n, m) > 1e6)
    throw TooLarge("select_exhaustive: C(n,m) exceeds 1e6");

  // Enumerate all combinations; fan out across threads and reduce by
  // (objective, lexicographic index set) so the result is deterministic.
  std::vector<std::vector<size_t>> combos;
  std::vector<size_t> c(m);
  std::iota(c.begin(), c.end(), size_t{0});
  do {
    combos.push_back(c);
  } while (next_combination(c, k.n));

  std::vector<double> objs(combos.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(combos.size()); ++i)
    objs[i] = selection_objective(k, IndexSet::of(combos[i]));

  size_t best = 0;
  for (size_t i = 1; i < combos.size(); ++i) {
    if (objs[i] < objs[best] ||
        (objs[i] == objs[best] && combos[i] < combos[best]))
      best = i;
  }
  SelectionResult r;
  r.indices = IndexSet::of(combos[best]);
  r.method = Method::exhaustive;
  r.objective = objs[best];
  r.runtime_seconds = seconds_since(start);
  return r;
}

SelectionResult select_facility_location(const VoltageDataset& data, size_t m) {
  const auto start = Clock::now();
  const size_t n = data.n_customers, d = data.n_timesteps;
  if (m < 1 || m > n)
    throw BadCardinality("select_facility_location: need 1 <= m <= n");

  std::vector<double> norm(n);
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) s += data.voltages(i, j) * data.voltages(i, j);
    norm[i] = std::sqrt(s);
    if (norm[i] <= 0.0)
      throw ZeroNormRow("select_facility_location: zero-norm row " + std::to_string(i));
  }
  auto chord = [&](size_t a, size_t b) {
    const double* xa = data.voltages.row(a);
    const double* xb = data.voltages.row(b);
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) s += xa[j] * xb[j];
    const double cos = s / (norm[a] * norm[b]);
    return std::sqrt(std::max(2.0 - 2.0 * cos, 0.0));
  };

  size_t first = 0;
  for (size_t i = 1; i < n; ++i)
    if (norm[i] > norm[first]) first = i;

  std::vector<size_t> chosen{first};
  std::vector<double> min_dist(n);
  for (size_t i = 0; i < n; ++i) min_dist[i] = chord(i, first);
  while (chosen.size() < m) {
    size_t next = 0;
    for (size_t i = 1; i < n; ++i)
      if (min_dist[i] > min_dist[next]) next = i;
    chosen.push_back(next);
    for (size_t i = 0; i < n; ++i) min_dist[i] = std::min(min_dist[i], chord(i, next));
  }
  std::sort(chosen.begin(), chosen.end());

  SelectionResult r;
  r.indices = IndexSet::of(std::move(chosen));
  r.method = Method::facility;
  if (m < n) {
    const SymMatrix k = cosine_kernel_matrix(data, false);
    r.objective = selection_objective(k, r.indices);
  }
  r.runtime_seconds = seconds_since(start);
  return r;
}

IndexSet random_index_set(size_t n, size_t m, uint64_t seed) {
  if (m < 1 || m > n) throw BadCardinality("random_index_set: need 1 <= m <= n");
  rng::Stream s(seed, rng::kStreamSelect);
  return IndexSet::of(rng::sample_without_replacement(n, m, s));
}

SelectionResult select_random(const SymMatrix& k, size_t m, uint64_t seed) {
  const auto start = Clock::now();
  check_cardinality(k.n, m);
  SelectionResult r;
  r.indices = random_index_set(k.n, m, seed);
  r.method = Method::random;
  r.objective = selection_objective(k, r.indices);
  r.runtime_seconds = seconds_since(start);
  return r;
}

LoewnerReport check_loewner_minimality(const SymMatrix& k, size_t m) {
  check_cardinality(k.n, m);
  if (binomial(k.n, m) > 1e4)
    throw TooLarge("check_loewner_minimality: C(n,m) exceeds 1e4");

  std::vector<std::vector<size_t>> combos;
  std::vector<size_t> c(m);
  std::iota(c.begin(), c.end(), size_t{0});
  do {
    combos.push_back(c);
  } while (next_combination(c, k.n));

  std::vector<SymMatrix> complements(combos.size());
  std::vector<double> inv_trace(combos.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(combos.size()); ++i) {
    complements[i] = numerics::schur_complement(k, IndexSet::of(combos[i]));
    const SymMatrix inv = numerics::invert_spd(complements[i]);
    double t = 0.0;
    for (size_t j = 0; j < inv.n; ++j) t += inv(j, j);
    inv_trace[i] = t;
  }

  size_t star = 0;
  for (size_t i = 1; i < combos.size(); ++i) {
    if (inv_trace[i] > inv_trace[star] ||
        (inv_trace[i] == inv_trace[star] && combos[i] < combos[star]))
      star = i;
  }

  LoewnerReport rep;
  rep.maximizer = IndexSet::of(combos[star]);
  rep.holds = true;
  const SymMatrix& a = complements[star];
  const double a_norm = frobenius_norm(a);
  for (size_t i = 0; i < combos.size(); ++i) {
    if (i == star) continue;
    const SymMatrix& b = complements[i];
    // A* > B requires A* - B PSD and A* != B.
    if (relative_frobenius_distance(a, b) <= 1e-9) continue;
    SymMatrix diff(a.n);
    for (size_t p = 0; p < diff.a.size(); ++p) diff.a[p] = a.a[p] - b.a[p];
    const double tol = 1e-9 * std::max(1.0, a_norm);
    if (numerics::min_eigenvalue(diff) >= -tol) {
      rep.holds = false;
      rep.witness = IndexSet::of(combos[i]);
      break;
    }
  }
  return rep;
}

}  // namespace phaseid::selection
