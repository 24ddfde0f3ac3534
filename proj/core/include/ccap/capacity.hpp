#pragma once

#include <map>
#include <string>

#include "ccap/trajectory.hpp"

namespace ccap {

/// Empirical transition frequencies: for every discretized state, how often
/// it was visited and where it went. Counts are raw (self-transitions
/// included); terminal records do not contribute an outgoing count.
struct StateCounts {
  long total = 0;                 // outgoing transitions observed at this state
  std::map<StateKey, long> next;  // next-state key -> count
};

struct CountTable {
  std::map<StateKey, StateCounts> rows;
  EnvKind kind = EnvKind::DiscreteMaze;
  double bin_width = 0.0;  // 0 => exact integer keys
};

CountTable count_transitions(const TrajectorySet& trajs, double bin_width);

/// Plug-in entropy in nats of a nonnegative count vector.
double entropy_nats(const std::map<StateKey, long>& counts, long total);

/// Monte Carlo capacity of state s: the entropy of its empirical next-state
/// distribution, with moves that stayed in the same discretized state
/// dropped first (no physical transition means no causal choice; dead ends
/// therefore score 0 and an L-corner scores ln 2). min_samples gates on the
/// raw visit count. Optional Miller-Madow bias correction.
double capacity_mc(const CountTable& counts, StateKey s, int min_samples = 20,
                   bool miller_madow = false);

enum class EstimatorTag { Mc, Clustered };

struct CapacityEntry {
  double capacity = 0.0;
  int support = 0;      // distinct next keys / clusters
  long samples = 0;     // visits backing the estimate
  bool low_confidence = false;
};

/// Per-state causal capacity in nats.
struct CapacityMap {
  std::map<StateKey, CapacityEntry> states;
  EstimatorTag estimator = EstimatorTag::Mc;
  double bin_width = 0.0;

  Vec2 key_position(StateKey k) const {
    if (bin_width > 0.0) return {(k.kx + 0.5) * bin_width, (k.ky + 0.5) * bin_width};
    return {static_cast<double>(k.kx), static_cast<double>(k.ky)};
  }
};

struct PartitionConfig;  // clustering.hpp

/// Batch capacity over all sufficiently sampled states. States below
/// min_samples keep their estimate but are flagged low-confidence. The
/// result depends only on the multiset of transitions, not their order.
CapacityMap capacity_map(const TrajectorySet& trajs, const PartitionConfig& cfg,
                         EstimatorTag estimator, int min_samples = 20,
                         bool miller_madow = false);

/// Mc estimator from precomputed counts.
CapacityMap capacity_map(const CountTable& counts, int min_samples = 20,
                         bool miller_madow = false);

/// Tabular records `kx ky capacity support samples confidence`.
void write_capacity_map(const std::string& path, const CapacityMap& map);
CapacityMap read_capacity_map(const std::string& path);

}  // namespace ccap
