#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ccap/capacity.hpp"
#include "ccap/maze.hpp"
#include "ccap/trajectory.hpp"

namespace ccap {

/// A selected decision-point state. The anchor is the key's position in
/// maze units; a state achieves the subgoal when it comes within radius.
struct Subgoal {
  int id = 0;
  StateKey key;
  Vec2 anchor;
  double capacity = 0.0;
  double radius = 0.7;  // tau_nei
};

struct SubgoalSet {
  std::vector<Subgoal> goals;
  double suppression_radius = 1.0;

  bool empty() const { return goals.empty(); }
  const Subgoal* by_id(int id) const;
};

/// Greedy non-maximum suppression over the capacity map: repeatedly take
/// the highest-capacity unsuppressed state at or above the threshold, emit
/// it, and suppress everything within suppression_radius (inclusive).
/// Low-confidence entries never become subgoals. Ties break on key order.
SubgoalSet select_subgoals(const CapacityMap& cmap, double threshold,
                           double suppression_radius, double tau_nei = 0.7);

/// Directed multigraph of observed subgoal-to-subgoal progressions plus the
/// region map labelling every visited state with the subgoal its
/// trajectories most often achieve next.
struct SubgoalGraph {
  static constexpr int kGoalNode = -1;  // virtual per-episode final goal

  SubgoalSet subgoals;
  std::map<std::pair<int, int>, long> edges;  // (from,to) -> count; self-edges kept
  std::map<StateKey, int> region;             // state key -> owning subgoal id
  double bin_width = 0.0;                     // keying of the region map

  Vec2 key_position(StateKey k) const {
    if (bin_width > 0.0) return {(k.kx + 0.5) * bin_width, (k.ky + 0.5) * bin_width};
    return {static_cast<double>(k.kx), static_cast<double>(k.ky)};
  }
  /// Region of a key; falls back to the straight-line nearest anchor for
  /// keys the logs never labelled.
  int region_of(StateKey k) const;
};

/// Scans every episode for achievement events (entering a subgoal's radius)
/// and records an edge from the previously achieved subgoal to the new one.
/// The optional maze upgrades the region-map fallback from straight-line
/// nearest anchor to nearest by maze distance.
SubgoalGraph build_subgoal_graph(const TrajectorySet& trajs, const SubgoalSet& subgoals,
                                 double tau_nei, const MazeSpec* maze = nullptr);

/// First hop of the shortest edge path from the current region's subgoal to
/// the final goal's region; kGoalNode when the goal is already local.
int plan_next_subgoal(const SubgoalGraph& graph, int current_region, StateKey final_goal);

/// Straight-line nearest anchor, ties to the lowest id. Deliberately
/// wall-blind; the ablation baseline.
int assign_nearest(Vec2 state, const SubgoalSet& subgoals);

/// BFS hop distances from src over free cells, row-major, -1 if unreachable.
std::vector<int> bfs_distances(const MazeSpec& maze, GridPos src);

/// Text records: `subgoal id x y capacity`, `edge i j count`,
/// `region kx ky id`.
void write_subgoal_graph(const std::string& path, const SubgoalGraph& graph);
SubgoalGraph read_subgoal_graph(const std::string& path);

}  // namespace ccap
