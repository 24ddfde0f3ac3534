#pragma once

#include <span>
#include <vector>

#include "ccap/geometry.hpp"

namespace ccap {

/// Distance bands around an anchor state. States closer than tau_nei count
/// as the same physical state; states in [tau_nei, tau_adj) are reachable
/// in one action and form the general next-state set; everything beyond
/// tau_adj needs several transitions.
struct PartitionConfig {
  double tau_nei = 0.7;
  double tau_adj = 1.0;
  Metric metric = Metric::Euclidean;
  double link_threshold = 0.7;  // clustering stop distance; defaults to tau_nei

  void validate() const;
};

/// Index sets over the input samples, disjoint by construction.
struct Partition {
  std::vector<int> nei;
  std::vector<int> adj;
  std::vector<int> out;
};

Partition partition_states(std::span<const Vec2> samples, Vec2 anchor,
                           const PartitionConfig& cfg);

/// Bottom-up average-linkage clustering. Singletons are merged closest-pair
/// first until the minimum inter-cluster distance reaches link_threshold.
/// Ties break toward the lowest point index, so identical inputs always
/// produce identical clusters.
struct ClusterResult {
  std::vector<std::vector<int>> clusters;  // member indices, each sorted
  std::vector<double> probabilities;       // |cluster| / n
};

ClusterResult agglomerative_cluster(std::span<const Vec2> points, Metric metric,
                                    double link_threshold);

/// Clustering-based capacity of an anchor state: partition the samples,
/// cluster the adjacent band, return the entropy (nats) of the cluster-size
/// frequencies. The adjacent band is capped at max_points (stride
/// subsample) to bound the clustering cost.
double capacity_clustered(std::span<const Vec2> samples, Vec2 anchor,
                          const PartitionConfig& cfg, int min_samples = 20,
                          int max_points = 400);

/// The clusters behind capacity_clustered, for inspection and tests.
ClusterResult cluster_adjacent(std::span<const Vec2> samples, Vec2 anchor,
                               const PartitionConfig& cfg, int max_points = 400);

}  // namespace ccap
