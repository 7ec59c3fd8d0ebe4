// SPDX-License-Identifier: Apache-2.0
#include "phaseid/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "phaseid/rng.hpp"

namespace phaseid::baselines {

namespace {

double sq_dist(const double* a, const double* b, size_t d) {
  double s = 0.0;
  for (size_t i = 0; i < d; ++i) {
    const double v = a[i] - b[i];
    s += v * v;
  }
  return s;
}

}  // namespace

std::vector<int> knn_classify(const Matrix& train, const std::vector<int>& train_labels,
                              const Matrix& query, size_t k) {
  if (train.rows == 0) throw EmptyTrain("knn_classify: empty training set");
  if (train_labels.size() != train.rows)
    throw ShapeMismatch("knn_classify: label count mismatch");
  if (k < 1 || k > train.rows)
    throw BadCardinality("knn_classify: need 1 <= k <= |train|");
  if (query.cols != train.cols)
    throw ShapeMismatch("knn_classify: feature width mismatch");

  const int max_label = *std::max_element(train_labels.begin(), train_labels.end());
  std::vector<int> out(query.rows);
#pragma omp parallel for schedule(static)
  for (long long qq = 0; qq < static_cast<long long>(query.rows); ++qq) {
    const size_t q = static_cast<size_t>(qq);
    std::vector<std::pair<double, size_t>> dist(train.rows);
    for (size_t i = 0; i < train.rows; ++i)
      dist[i] = {sq_dist(query.row(q), train.row(i), train.cols), i};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::vector<size_t> votes(max_label + 1, 0);
    for (size_t i = 0; i < k; ++i) ++votes[train_labels[dist[i].second]];
    int best = 0;
    for (int l = 1; l <= max_label; ++l)
      if (votes[l] > votes[best]) best = l;
    out[q] = best;
  }
  return out;
}

ClusterAssignment correlation_linkage(const Matrix& rows, size_t n_clusters) {
  const size_t n = rows.rows, d = rows.cols;
  if (n_clusters < 1) throw BadCardinality("correlation_linkage: n_clusters >= 1");
  if (n_clusters > n) throw BadCardinality("correlation_linkage: n_clusters > rows");

  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Pearson correlation; constant rows get +inf dissimilarity to everything.
  std::vector<double> mean(n), norm(n);
  std::vector<bool> constant(n, false);
  for (size_t i = 0; i < n; ++i) {
    double m = 0.0;
    for (size_t j = 0; j < d; ++j) m += rows(i, j);
    mean[i] = m / static_cast<double>(d);
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) {
      const double v = rows(i, j) - mean[i];
      s += v * v;
    }
    norm[i] = std::sqrt(s);
    constant[i] = norm[i] <= 1e-14;
  }
  Matrix dis(n, n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < i; ++j) {
      double v;
      if (constant[i] || constant[j]) {
        v = kInf;
      } else {
        double s = 0.0;
        for (size_t t = 0; t < d; ++t)
          s += (rows(i, t) - mean[i]) * (rows(j, t) - mean[j]);
        v = 1.0 - s / (norm[i] * norm[j]);
      }
      dis(i, j) = dis(j, i) = v;
    }
  }

  // Active clusters keyed by smallest member; complete-linkage distance
  // matrix updated as D(A+B, C) = max(D(A,C), D(B,C)).
  std::vector<int> cluster_of(n);
  std::iota(cluster_of.begin(), cluster_of.end(), 0);
  std::vector<bool> active(n, true);
  size_t count = n;
  while (count > n_clusters) {
    double best = kInf;
    size_t bi = n, bj = n;
    for (size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (dis(i, j) < best) {
          best = dis(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n || best == kInf) break;  // only singleton-forced pairs remain
    // Merge bj into bi (bi < bj keeps the smallest-member key).
    for (size_t t = 0; t < n; ++t) {
      if (!active[t] || t == bi || t == bj) continue;
      const double v = std::max(dis(bi, t), dis(bj, t));
      dis(bi, t) = dis(t, bi) = v;
    }
    for (size_t t = 0; t < n; ++t)
      if (cluster_of[t] == static_cast<int>(bj)) cluster_of[t] = static_cast<int>(bi);
    active[bj] = false;
    --count;
  }

  // Renumber contiguously by smallest member index.
  std::vector<int> remap(n, -1);
  int next = 0;
  ClusterAssignment out;
  out.cluster_of.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const int key = cluster_of[i];
    if (remap[key] < 0) remap[key] = next++;
    out.cluster_of[i] = remap[key];
  }
  out.n_clusters = static_cast<size_t>(next);
  return out;
}

ClusterAssignment kmeans_phase_cluster(const Matrix& rows, size_t n_clusters,
                                       uint64_t seed) {
  const size_t n = rows.rows, d = rows.cols;
  if (n_clusters < 1) throw BadCardinality("kmeans: n_clusters >= 1");
  if (n_clusters > n) throw BadCardinality("kmeans: n_clusters > rows");

  rng::Stream stream(seed, rng::kStreamKmeans);
  std::vector<size_t> centre_rows{stream.next_below(n)};
  std::vector<double> min_d(n);
  for (size_t i = 0; i < n; ++i)
    min_d[i] = sq_dist(rows.row(i), rows.row(centre_rows[0]), d);
  while (centre_rows.size() < n_clusters) {
    size_t far = 0;
    for (size_t i = 1; i < n; ++i)
      if (min_d[i] > min_d[far]) far = i;
    centre_rows.push_back(far);
    for (size_t i = 0; i < n; ++i)
      min_d[i] = std::min(min_d[i], sq_dist(rows.row(i), rows.row(far), d));
  }
  Matrix centres(n_clusters, d);
  for (size_t c = 0; c < n_clusters; ++c)
    std::copy(rows.row(centre_rows[c]), rows.row(centre_rows[c]) + d, centres.row(c));

  std::vector<int> assign(n, 0);
  for (size_t iter = 0; iter < 100; ++iter) {
    // Assign.
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
      const size_t i = static_cast<size_t>(ii);
      size_t best = 0;
      double bd = sq_dist(rows.row(i), centres.row(0), d);
      for (size_t c = 1; c < n_clusters; ++c) {
        const double v = sq_dist(rows.row(i), centres.row(c), d);
        if (v < bd) {
          bd = v;
          best = c;
        }
      }
      assign[i] = static_cast<int>(best);
    }
    // Update.
    Matrix next(n_clusters, d);
    std::vector<size_t> cnt(n_clusters, 0);
    for (size_t i = 0; i < n; ++i) {
      ++cnt[assign[i]];
      for (size_t j = 0; j < d; ++j) next(assign[i], j) += rows(i, j);
    }
    for (size_t c = 0; c < n_clusters; ++c) {
      if (cnt[c] == 0) {
        // Reseed the empty cluster from the point farthest from its centre.
        size_t far = 0;
        double fd = -1.0;
        for (size_t i = 0; i < n; ++i) {
          const double v = sq_dist(rows.row(i), centres.row(assign[i]), d);
          if (v > fd) {
            fd = v;
            far = i;
          }
        }
        std::copy(rows.row(far), rows.row(far) + d, next.row(c));
      } else {
        for (size_t j = 0; j < d; ++j) next(c, j) /= static_cast<double>(cnt[c]);
      }
    }
    double move = 0.0;
    for (size_t i = 0; i < next.a.size(); ++i)
      move = std::max(move, std::abs(next.a[i] - centres.a[i]));
    centres = std::move(next);
    if (move < 1e-8) break;
  }

  ClusterAssignment out;
  out.cluster_of = std::move(assign);
  out.n_clusters = n_clusters;
  return out;
}

std::vector<int> map_clusters_to_labels(const ClusterAssignment& assignment,
                                        const IndexSet& labeled,
                                        const std::vector<int>& labels,
                                        int n_label_values) {
  if (labeled.empty()) throw NoLabels("map_clusters_to_labels: no labeled members");
  if (labels.size() != labeled.size())
    throw ShapeMismatch("map_clusters_to_labels: labels do not match subset");

  std::vector<size_t> global_votes(n_label_values, 0);
  std::vector<std::vector<size_t>> votes(assignment.n_clusters,
                                         std::vector<size_t>(n_label_values, 0));
  for (size_t i = 0; i < labeled.size(); ++i) {
    const size_t customer = labeled.indices[i];
    ++votes[assignment.cluster_of[customer]][labels[i]];
    ++global_votes[labels[i]];
  }
  auto majority = [](const std::vector<size_t>& v) {
    size_t best = 0;
    for (size_t l = 1; l < v.size(); ++l)
      if (v[l] > v[best]) best = l;
    return static_cast<int>(best);
  };
  const int global = majority(global_votes);
  std::vector<int> cluster_label(assignment.n_clusters, global);
  for (size_t c = 0; c < assignment.n_clusters; ++c) {
    size_t total = 0;
    for (size_t l : votes[c]) total += l;
    if (total > 0) cluster_label[c] = majority(votes[c]);
  }
  std::vector<int> out(assignment.cluster_of.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = cluster_label[assignment.cluster_of[i]];
  return out;
}

}  // namespace phaseid::baselines
