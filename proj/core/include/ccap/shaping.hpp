#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ccap/subgoals.hpp"
#include "ccap/tabular.hpp"

namespace ccap {

/// Concatenated per-region potential over maze cells. Within a region the
/// potential is the normalized maze distance to the region's planned exit
/// subgoal; region base offsets stack along the planned chain so the
/// potential falls monotonically toward the final goal.
struct PotentialField {
  std::map<StateKey, double> phi;     // cell key (col,row) -> potential
  std::map<StateKey, int> region_id;  // owning region per cell
  StateKey goal_key;
  std::vector<int> flagged_regions;  // regions with no path to the goal
  double max_phi = 0.0;

  double value(StateKey cell) const;
  const double* find(StateKey cell) const {
    const auto it = phi.find(cell);
    return it == phi.end() ? nullptr : &it->second;
  }
};

/// Builds the field for one final goal. With no subgoals the whole maze is
/// a single region whose potential is the normalized distance to the goal.
/// Regions that cannot reach the goal's region along graph edges are
/// flagged and left out of the field.
PotentialField build_potentials(const MazeSpec& maze, const SubgoalSet& subgoals,
                                const SubgoalGraph& graph, GridPos final_goal);

/// Straight-line potential toward the goal, wall-blind: the single-field
/// baseline the concatenated construction is compared against.
PotentialField build_naive_field(const MazeSpec& maze, GridPos final_goal);

/// Runtime shaping term gamma*phi(s) - phi(s'), applied only when the
/// predicted subgoal matches the planned one.
double shaped_reward(const PotentialField& field, const Transition& tr, double gamma,
                     int predicted, int planned, double kappa = 1.0,
                     EnvKind kind = EnvKind::DiscreteMaze);

/// Potential bonus in the policy-invariant arrangement phi(s) - gamma*phi(s')
/// (the potential -phi plugged into the standard shaping form); this is the
/// form the invariance check exercises.
double invariant_bonus(const PotentialField& field, StateKey s, StateKey next, double gamma);

using RewardFn = std::function<double(int s, int a, int s2)>;

struct InvarianceReport {
  int n_states = 0;
  std::vector<int> mismatched_states;
  bool ok() const { return mismatched_states.empty(); }
};

/// Value-iterates both reward functions on the MDP and compares the greedy
/// action sets (tie band tol) at every state.
InvarianceReport compare_greedy_sets(const TabularMDP& mdp, const RewardFn& base,
                                     const RewardFn& other, double gamma, double tol);

/// Checks that ungated potential shaping leaves the greedy sets of the base
/// reward unchanged. The MDP must carry maze coordinates so field lookups
/// can address its states.
InvarianceReport verify_invariance(const TabularMDP& mdp, const RewardFn& base,
                                   const PotentialField& field, double gamma, double tol);

/// Greedy steepest-descent walk on the field from start; returns the cells
/// visited. Stops when no free neighbour has strictly smaller potential.
std::vector<GridPos> greedy_descent(const MazeSpec& maze, const PotentialField& field,
                                    GridPos start, int max_steps = 10000);

/// Same layout as the capacity-map format, one record per cell.
void write_potential_field(const std::string& path, const PotentialField& field);

}  // namespace ccap
