#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "ccap/maze.hpp"
#include "ccap/rng.hpp"

namespace ccap {

/// Exact finite MDP: the full transition tensor p[s][a][s']. Used as the
/// brute-force oracle against which the sampled estimators are checked.
struct TabularMDP {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> p;                // flattened [s][a][s']
  std::vector<GridPos> state_coords;    // maze cell per state; empty if none

  double prob(int s, int a, int s2) const {
    return p[(static_cast<size_t>(s) * n_actions + a) * n_states + s2];
  }
  double& prob_ref(int s, int a, int s2) {
    return p[(static_cast<size_t>(s) * n_actions + a) * n_states + s2];
  }
  std::span<const double> row(int s, int a) const {
    return {p.data() + (static_cast<size_t>(s) * n_actions + a) * n_states,
            static_cast<size_t>(n_states)};
  }
  /// Every (s,a) row is a probability distribution within tol.
  bool stochastic(double tol = 1e-9) const;
};

/// Enumerates free cells (row-major) as states and fills the tensor with
/// the exact step_discrete slip dynamics.
TabularMDP build_tabular(const MazeSpec& maze, double noise);

/// Lookup table from maze cell to tabular state index.
std::unordered_map<uint64_t, int> state_index_map(const TabularMDP& mdp);

/// Seeded random MDP with at most `branching` successor states per (s,a)
/// row. branching = 1 yields a deterministic MDP.
TabularMDP random_tabular(int n_states, int n_actions, int branching, uint64_t seed);

/// Draws s' ~ p(.|s,a).
int sample_next(const TabularMDP& mdp, int s, int a, Rng& rng);

/// Copy with state `s` made absorbing (all actions self-loop); used to pin
/// goals for value iteration.
TabularMDP with_absorbing_state(TabularMDP mdp, int s);

}  // namespace ccap
