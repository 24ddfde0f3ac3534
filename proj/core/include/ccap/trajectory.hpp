#pragma once

#include <map>
#include <string>
#include <vector>

#include "ccap/env.hpp"

namespace ccap {

/// Ordered rollout log. Within an episode, next_state of record t equals
/// state of record t+1 unless the episode terminated; episode indices are
/// contiguous starting at 0.
struct TrajectorySet {
  std::vector<Transition> transitions;
  int episodes = 0;
  uint64_t seed = 0;
  std::string policy;  // "random" | "frontier"
  std::string env;     // environment tag
  EnvKind kind = EnvKind::DiscreteMaze;

  bool empty() const { return transitions.empty(); }
};

/// True if the chaining invariant holds on every episode.
bool chained(const TrajectorySet& set);

/// Appends b to a, renumbering b's episodes to stay contiguous.
TrajectorySet merge_trajectories(TrajectorySet a, const TrajectorySet& b);

/// Visit frequency per discretized state key; one count per logged record.
struct VisitCounts {
  std::map<StateKey, long> counts;
  long total = 0;
  double bin_width = 0.0;  // 0 for exact integer keys
};

VisitCounts visit_counts(const TrajectorySet& set, double bin_width);

/// Discretizer used throughout: exact (col,row)/(index,0) keys for grid and
/// tabular records, bin_width bins for continuous records.
StateKey discretize(const Transition& tr, EnvKind kind, double bin_width, bool next);

/// Line-delimited trajectory log: metadata comments, a column header, then
/// one transition per line `episode t sx sy ax ay nsx nsy reward done`.
/// Doubles use shortest round-trip formatting; read(write(x)) == x.
void write_trajectories(const std::string& path, const TrajectorySet& set);
TrajectorySet read_trajectories(const std::string& path);

}  // namespace ccap
