// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "phaseid/matrix.hpp"

namespace phaseid::baselines {

// k-nearest-neighbour majority vote on Euclidean distance; vote ties go to
// the smallest label id, distance ties to the smaller row index.
std::vector<int> knn_classify(const Matrix& train, const std::vector<int>& train_labels,
                              const Matrix& query, size_t k);

struct ClusterAssignment {
  std::vector<int> cluster_of;  // contiguous ids from 0
  size_t n_clusters = 0;
};

// Agglomerative complete-linkage clustering with dissimilarity
// 1 - Pearson correlation of rows; merge ties resolve to the smallest
// (i, j) pair. Constant rows have undefined correlation and stay
// singleton clusters.
ClusterAssignment correlation_linkage(const Matrix& rows, size_t n_clusters);

// Lloyd's algorithm with farthest-point seeding (first centre drawn per
// seed); 100 iterations or centroid movement below 1e-8. Empty clusters
// are reseeded from the farthest point.
ClusterAssignment kmeans_phase_cluster(const Matrix& rows, size_t n_clusters,
                                       uint64_t seed);

// Majority label among each cluster's labeled members; clusters without
// labeled members take the global majority. Ties go to the smaller id.
std::vector<int> map_clusters_to_labels(const ClusterAssignment& assignment,
                                        const IndexSet& labeled,
                                        const std::vector<int>& labels,
                                        int n_label_values);

}  // namespace phaseid::baselines
