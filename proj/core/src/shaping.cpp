#include "ccap/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

#include "ccap/errors.hpp"
#include "ccap/io_util.hpp"
#include "ccap/rl.hpp"

namespace ccap {

double PotentialField::value(StateKey cell) const {
  const auto it = phi.find(cell);
  if (it == phi.end())
    throw UnknownState("no potential for cell (" + std::to_string(cell.kx) + "," +
                       std::to_string(cell.ky) + ")");
  return it->second;
}

namespace {

StateKey cell_key_of_state(Vec2 state, EnvKind kind) {
  if (kind == EnvKind::ContinuousMaze)
    return {static_cast<int32_t>(std::floor(state.x)), static_cast<int32_t>(std::floor(state.y))};
  return {static_cast<int32_t>(state.x), static_cast<int32_t>(state.y)};
}

int region_for_cell(const SubgoalGraph& graph, const std::vector<std::vector<int>>& anchor_dists,
                    const MazeSpec& maze, GridPos cell) {
  // Exact region key first (grid-keyed graphs), then the bin containing the
  // cell center (continuous-keyed graphs), then nearest anchor by maze
  // distance.
  if (graph.bin_width > 0.0) {
    const Vec2 center = cell_center(cell);
    const auto it = graph.region.find(key_from_position(center, graph.bin_width));
    if (it != graph.region.end()) return it->second;
  } else {
    const auto it = graph.region.find(StateKey{cell.col, cell.row});
    if (it != graph.region.end()) return it->second;
  }
  int best_id = -1;
  int best_d = std::numeric_limits<int>::max();
  for (size_t i = 0; i < graph.subgoals.goals.size(); ++i) {
    const int d = anchor_dists[i][static_cast<size_t>(cell.row) * maze.width + cell.col];
    if (d >= 0 && d < best_d) {
      best_d = d;
      best_id = graph.subgoals.goals[i].id;
    }
  }
  return best_id;
}

}  // namespace

PotentialField build_potentials(const MazeSpec& maze, const SubgoalSet& subgoals,
                                const SubgoalGraph& graph, GridPos final_goal) {
  if (!maze.is_free(final_goal))
    throw UnreachableGoal("final goal (" + std::to_string(final_goal.row) + "," +
                          std::to_string(final_goal.col) + ") is not a free cell");

  PotentialField field;
  field.goal_key = {final_goal.col, final_goal.row};
  const auto cells = maze.free_cells();

  if (subgoals.empty()) {
    // Degenerate single region: normalized distance to the goal.
    const auto dist = bfs_distances(maze, final_goal);
    int max_d = 0;
    for (const GridPos& c : cells)
      max_d = std::max(max_d, dist[static_cast<size_t>(c.row) * maze.width + c.col]);
    for (const GridPos& c : cells) {
      const int d = dist[static_cast<size_t>(c.row) * maze.width + c.col];
      if (d < 0) continue;  // unreachable pocket
      field.phi[{c.col, c.row}] = max_d > 0 ? static_cast<double>(d) / max_d : 0.0;
      field.region_id[{c.col, c.row}] = SubgoalGraph::kGoalNode;
    }
    field.max_phi = 1.0;
    return field;
  }

  std::vector<std::vector<int>> anchor_dists;
  anchor_dists.reserve(subgoals.goals.size());
  for (const Subgoal& g : subgoals.goals) {
    const GridPos cell{static_cast<int>(g.anchor.y), static_cast<int>(g.anchor.x)};
    anchor_dists.push_back(bfs_distances(maze, cell));
  }

  // Region of every free cell, then the hop offset of each region along the
  // planned chain to the goal region.
  std::map<StateKey, int> cell_region;
  for (const GridPos& c : cells)
    cell_region[{c.col, c.row}] = region_for_cell(graph, anchor_dists, maze, c);
  const int goal_region = cell_region.at(field.goal_key);

  std::map<int, int> offset;     // region id -> hops to goal region
  std::map<int, int> exit_hop;   // region id -> next region toward the goal
  offset[goal_region] = 0;
  {
    // reverse BFS over edges: find regions that can reach goal_region
    std::map<int, std::vector<int>> rev;
    for (const auto& [edge, count] : graph.edges) {
      if (edge.first == edge.second || count <= 0) continue;
      rev[edge.second].push_back(edge.first);
    }
    for (auto& [to, froms] : rev) std::sort(froms.begin(), froms.end());
    std::deque<int> queue{goal_region};
    while (!queue.empty()) {
      const int node = queue.front();
      queue.pop_front();
      const auto it = rev.find(node);
      if (it == rev.end()) continue;
      for (int from : it->second) {
        if (offset.count(from)) continue;
        offset[from] = offset.at(node) + 1;
        exit_hop[from] = node;
        queue.push_back(from);
      }
    }
  }

  for (const Subgoal& g : subgoals.goals)
    if (!offset.count(g.id)) field.flagged_regions.push_back(g.id);

  // Exit target per region: the next-hop subgoal's anchor cell, or the goal
  // itself inside the goal region.
  std::map<int, std::vector<int>> exit_dist;
  for (const auto& [region, hops] : offset) {
    if (region == goal_region) {
      exit_dist[region] = bfs_distances(maze, final_goal);
    } else {
      const Subgoal* next = subgoals.by_id(exit_hop.at(region));
      const GridPos cell{static_cast<int>(next->anchor.y), static_cast<int>(next->anchor.x)};
      exit_dist[region] = bfs_distances(maze, cell);
    }
  }

  // Local normalization per region: dist / max_dist keeps the local part in
  // [0,1]; the exit anchor sits outside its client regions, so cross-region
  // monotonicity stays strict.
  std::map<int, int> max_local;
  for (const GridPos& c : cells) {
    const int region = cell_region.at({c.col, c.row});
    if (!offset.count(region)) continue;
    const int d = exit_dist.at(region)[static_cast<size_t>(c.row) * maze.width + c.col];
    if (d < 0) continue;
    max_local[region] = std::max(max_local[region], d);
  }

  for (const GridPos& c : cells) {
    const StateKey key{c.col, c.row};
    const int region = cell_region.at(key);
    if (!offset.count(region)) continue;  // flagged region
    const int d = exit_dist.at(region)[static_cast<size_t>(c.row) * maze.width + c.col];
    if (d < 0) continue;
    const int max_d = std::max(1, max_local[region]);
    const double phi = offset.at(region) + static_cast<double>(d) / max_d;
    field.phi[key] = phi;
    field.region_id[key] = region;
    field.max_phi = std::max(field.max_phi, phi);
  }
  return field;
}

PotentialField build_naive_field(const MazeSpec& maze, GridPos final_goal) {
  if (!maze.is_free(final_goal)) throw UnreachableGoal("final goal is not a free cell");
  PotentialField field;
  field.goal_key = {final_goal.col, final_goal.row};
  double max_d = 0.0;
  for (const GridPos& c : maze.free_cells()) {
    const double d = distance(cell_center(c), cell_center(final_goal));
    field.phi[{c.col, c.row}] = d;
    field.region_id[{c.col, c.row}] = SubgoalGraph::kGoalNode;
    max_d = std::max(max_d, d);
  }
  if (max_d > 0.0)
    for (auto& [key, v] : field.phi) v /= max_d;
  field.max_phi = 1.0;
  return field;
}

double shaped_reward(const PotentialField& field, const Transition& tr, double gamma,
                     int predicted, int planned, double kappa, EnvKind kind) {
  if (predicted != planned) return tr.reward;  // activation gate
  const double phi_s = field.value(cell_key_of_state(tr.state, kind));
  const double phi_n = field.value(cell_key_of_state(tr.next_state, kind));
  return tr.reward + kappa * (gamma * phi_s - phi_n);
}

double invariant_bonus(const PotentialField& field, StateKey s, StateKey next, double gamma) {
  return field.value(s) - gamma * field.value(next);
}

InvarianceReport compare_greedy_sets(const TabularMDP& mdp, const RewardFn& base,
                                     const RewardFn& other, double gamma, double tol) {
  const ValueIteration a = value_iteration(mdp, base, gamma, 1e-12, 200000, tol);
  const ValueIteration b = value_iteration(mdp, other, gamma, 1e-12, 200000, tol);
  InvarianceReport rep;
  rep.n_states = mdp.n_states;
  for (int s = 0; s < mdp.n_states; ++s)
    if (a.greedy[static_cast<size_t>(s)] != b.greedy[static_cast<size_t>(s)])
      rep.mismatched_states.push_back(s);
  return rep;
}

InvarianceReport verify_invariance(const TabularMDP& mdp, const RewardFn& base,
                                   const PotentialField& field, double gamma, double tol) {
  if (mdp.state_coords.empty())
    throw UnknownState("verify_invariance needs maze coordinates on the MDP");
  std::vector<StateKey> keys(static_cast<size_t>(mdp.n_states));
  for (int s = 0; s < mdp.n_states; ++s)
    keys[static_cast<size_t>(s)] = {mdp.state_coords[static_cast<size_t>(s)].col,
                                    mdp.state_coords[static_cast<size_t>(s)].row};
  const RewardFn shaped = [&, keys](int s, int a, int s2) {
    return base(s, a, s2) +
           invariant_bonus(field, keys[static_cast<size_t>(s)], keys[static_cast<size_t>(s2)], gamma);
  };
  return compare_greedy_sets(mdp, base, shaped, gamma, tol);
}

std::vector<GridPos> greedy_descent(const MazeSpec& maze, const PotentialField& field,
                                    GridPos start, int max_steps) {
  std::vector<GridPos> path{start};
  GridPos cur = start;
  for (int step = 0; step < max_steps; ++step) {
    const double* cur_phi = field.find({cur.col, cur.row});
    if (cur_phi == nullptr) break;
    GridPos best = cur;
    double best_phi = *cur_phi;
    const GridPos nbrs[4] = {{cur.row - 1, cur.col}, {cur.row + 1, cur.col},
                             {cur.row, cur.col - 1}, {cur.row, cur.col + 1}};
    for (const GridPos& n : nbrs) {
      if (!maze.is_free(n)) continue;
      const double* p = field.find({n.col, n.row});
      if (p != nullptr && *p < best_phi) {
        best_phi = *p;
        best = n;
      }
    }
    if (best == cur) break;  // local minimum
    cur = best;
    path.push_back(cur);
  }
  return path;
}

void write_potential_field(const std::string& path, const PotentialField& field) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  std::string out;
  out += "# estimator potential\n";
  out += "# bin_width 0\n";
  out += "state_key capacity support samples confidence\n";
  for (const auto& [key, phi] : field.phi) {
    out += std::to_string(key.kx);
    out += ' ';
    out += std::to_string(key.ky);
    out += ' ';
    out += fmt_double(phi);
    out += " 0 0 ok\n";
  }
  f << out;
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace ccap
