#include "ccap/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccap/errors.hpp"

namespace ccap {

void PartitionConfig::validate() const {
  if (!(tau_nei > 0.0)) throw ConfigError("tau_nei", "must be > 0");
  if (!(tau_nei < tau_adj))
    throw ConfigError("tau_nei", "must be < tau_adj (tau_nei=" + std::to_string(tau_nei) +
                                     ", tau_adj=" + std::to_string(tau_adj) + ")");
  if (!(link_threshold > 0.0)) throw ConfigError("link_threshold", "must be > 0");
}

Partition partition_states(std::span<const Vec2> samples, Vec2 anchor,
                           const PartitionConfig& cfg) {
  cfg.validate();
  Partition part;
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    const double d = distance(samples[static_cast<size_t>(i)], anchor, cfg.metric);
    if (d < cfg.tau_nei)
      part.nei.push_back(i);
    else if (d < cfg.tau_adj)
      part.adj.push_back(i);
    else
      part.out.push_back(i);
  }
  return part;
}

ClusterResult agglomerative_cluster(std::span<const Vec2> points, Metric metric,
                                    double link_threshold) {
  const int n = static_cast<int>(points.size());
  if (n == 0) throw EmptyInput("agglomerative_cluster: no points");

  // Average linkage via Lance-Williams: d(A+B, C) is the size-weighted mean
  // of d(A,C) and d(B,C). O(n^3) scan is fine at the point counts we cap to.
  std::vector<std::vector<int>> members(static_cast<size_t>(n));
  std::vector<double> dist(static_cast<size_t>(n) * n, 0.0);
  std::vector<bool> alive(static_cast<size_t>(n), true);
  for (int i = 0; i < n; ++i) members[static_cast<size_t>(i)] = {i};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d =
          distance(points[static_cast<size_t>(i)], points[static_cast<size_t>(j)], metric);
      dist[static_cast<size_t>(i) * n + j] = d;
      dist[static_cast<size_t>(j) * n + i] = d;
    }

  int n_alive = n;
  while (n_alive > 1) {
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int i = 0; i < n; ++i) {
      if (!alive[static_cast<size_t>(i)]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!alive[static_cast<size_t>(j)]) continue;
        const double d = dist[static_cast<size_t>(i) * n + j];
        if (d < best) {  // strict <: ties keep the lowest (i, j) pair
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    if (best >= link_threshold) break;
    const double wi = static_cast<double>(members[static_cast<size_t>(bi)].size());
    const double wj = static_cast<double>(members[static_cast<size_t>(bj)].size());
    for (int k = 0; k < n; ++k) {
      if (!alive[static_cast<size_t>(k)] || k == bi || k == bj) continue;
      const double d = (wi * dist[static_cast<size_t>(bi) * n + k] +
                        wj * dist[static_cast<size_t>(bj) * n + k]) /
                       (wi + wj);
      dist[static_cast<size_t>(bi) * n + k] = d;
      dist[static_cast<size_t>(k) * n + bi] = d;
    }
    auto& mi = members[static_cast<size_t>(bi)];
    auto& mj = members[static_cast<size_t>(bj)];
    mi.insert(mi.end(), mj.begin(), mj.end());
    mj.clear();
    alive[static_cast<size_t>(bj)] = false;
    --n_alive;
  }

  ClusterResult result;
  for (int i = 0; i < n; ++i) {
    if (!alive[static_cast<size_t>(i)]) continue;
    auto m = members[static_cast<size_t>(i)];
    std::sort(m.begin(), m.end());
    result.clusters.push_back(std::move(m));
  }
  std::sort(result.clusters.begin(), result.clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  result.probabilities.reserve(result.clusters.size());
  for (const auto& c : result.clusters)
    result.probabilities.push_back(static_cast<double>(c.size()) / n);
  return result;
}

namespace {

// Stride subsample of the adjacent band, keeping relative cluster masses.
std::vector<Vec2> adjacent_points(std::span<const Vec2> samples, Vec2 anchor,
                                  const PartitionConfig& cfg, int max_points) {
  const Partition part = partition_states(samples, anchor, cfg);
  std::vector<Vec2> pts;
  const size_t n = part.adj.size();
  if (n == 0) return pts;
  const size_t stride = n <= static_cast<size_t>(max_points)
                            ? 1
                            : (n + static_cast<size_t>(max_points) - 1) /
                                  static_cast<size_t>(max_points);
  for (size_t i = 0; i < n; i += stride)
    pts.push_back(samples[static_cast<size_t>(part.adj[i])]);
  return pts;
}

}  // namespace

ClusterResult cluster_adjacent(std::span<const Vec2> samples, Vec2 anchor,
                               const PartitionConfig& cfg, int max_points) {
  const std::vector<Vec2> pts = adjacent_points(samples, anchor, cfg, max_points);
  if (pts.empty()) throw EmptyInput("cluster_adjacent: adjacent band is empty");
  return agglomerative_cluster(pts, cfg.metric, cfg.link_threshold);
}

double capacity_clustered(std::span<const Vec2> samples, Vec2 anchor,
                          const PartitionConfig& cfg, int min_samples, int max_points) {
  cfg.validate();
  const Partition part = partition_states(samples, anchor, cfg);
  if (static_cast<int>(part.adj.size()) < min_samples)
    throw InsufficientSamples("adjacent band has " + std::to_string(part.adj.size()) +
                              " samples, need " + std::to_string(min_samples));
  const ClusterResult clusters = cluster_adjacent(samples, anchor, cfg, max_points);
  double h = 0.0;
  for (double p : clusters.probabilities)
    if (p > 0.0) h -= p * std::log(p);
  return h < 0.0 ? 0.0 : h;
}

}  // namespace ccap
