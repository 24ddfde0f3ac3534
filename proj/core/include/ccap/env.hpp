#pragma once

#include <memory>
#include <optional>
#include <string>

#include "ccap/geometry.hpp"
#include "ccap/maze.hpp"
#include "ccap/rng.hpp"
#include "ccap/tabular.hpp"

namespace ccap {

/// Compass moves of the grid dynamics. Up decreases the row index (toward
/// the top line of the ASCII maze).
enum class Move : int { Up = 0, Down = 1, Left = 2, Right = 3 };
constexpr int kNumMoves = 4;

inline GridPos move_delta(Move m) {
  switch (m) {
    case Move::Up:
      return {-1, 0};
    case Move::Down:
      return {1, 0};
    case Move::Left:
      return {0, -1};
    default:
      return {0, 1};
  }
}

/// An action in maze units: unit cell offset for grid moves, arbitrary
/// displacement (clipped to step_max by the env) for continuous moves.
/// dy > 0 points downward, matching row order.
struct Action {
  double dx = 0.0;
  double dy = 0.0;

  static Action from_move(Move m) {
    const GridPos d = move_delta(m);
    return {static_cast<double>(d.col), static_cast<double>(d.row)};
  }
  std::optional<Move> as_move() const;
  double norm() const { return std::sqrt(dx * dx + dy * dy); }
};

/// One logged environment step. Grid states store (col, row) in state.x/.y
/// exactly; continuous states store maze-unit coordinates.
struct Transition {
  int episode = 0;
  int t = 0;
  Vec2 state;
  Action action;
  Vec2 next_state;
  double reward = 0.0;
  bool done = false;
};

/// Grid dynamics with slip noise: with probability 1-noise the chosen move
/// is executed, otherwise one of the three other moves is picked uniformly.
/// Moves into walls leave the state unchanged. Reward 1 iff next cell is
/// the goal.
Transition step_discrete(const MazeSpec& maze, GridPos s, Move a, double noise, Rng& rng,
                         std::optional<GridPos> goal = std::nullopt);

/// True if the position lies inside the free area (points on shared faces
/// of two free cells count as inside).
bool position_free(const MazeSpec& maze, Vec2 p);

/// Point-mass kinematics: next = s + a with wall collisions resolved by
/// sliding (blocked axis component cancelled at contact). Never penetrates
/// a wall. The rng parameter is reserved for stochastic variants; the
/// default dynamics are deterministic.
Transition step_continuous(const MazeSpec& maze, Vec2 s, Action a, Rng& rng,
                           std::optional<Vec2> goal = std::nullopt, double goal_radius = 0.7,
                           double step_max = 0.3);

/// Cell center as a continuous position; used when grid states feed
/// position-based consumers (predictor inputs, anchors).
inline Vec2 cell_center(GridPos p) {
  return {static_cast<double>(p.col) + 0.5, static_cast<double>(p.row) + 0.5};
}

enum class EnvKind { DiscreteMaze, ContinuousMaze, Tabular };

/// Uniform rollout interface over the three state spaces. Grid states are
/// exposed as exact (col, row) coordinates, tabular states as (index, 0),
/// so one Transition record type covers all of them.
class Env {
 public:
  static Env discrete_maze(MazeSpec maze, double noise = 0.0);
  static Env continuous_maze(MazeSpec maze, double step_max = 0.3, double tau_nei = 0.7);
  static Env tabular(TabularMDP mdp);

  EnvKind kind() const { return kind_; }
  bool has_maze() const { return kind_ != EnvKind::Tabular; }
  const MazeSpec& maze() const { return maze_; }
  double noise() const { return noise_; }
  double step_max() const { return step_max_; }
  double tau_nei() const { return tau_nei_; }
  std::string tag() const;

  Vec2 random_start(Rng& rng) const;
  Action random_action(Rng& rng) const;
  Transition step(Vec2 s, const Action& a, Rng& rng, std::optional<Vec2> goal = {}) const;

  /// Discretized key: cell for grid states, tau_nei bin for continuous
  /// states, (index, 0) for tabular states.
  StateKey state_key(Vec2 s) const;
  /// Representative position of a key (inverse of state_key up to binning).
  Vec2 key_position(StateKey k) const;

  /// Goal test used by episodic tasks: same cell for grids, within tau_nei
  /// for continuous states.
  bool at_goal(Vec2 s, Vec2 goal) const;

  const TabularMDP& mdp() const;

 private:
  Env() = default;
  EnvKind kind_ = EnvKind::DiscreteMaze;
  MazeSpec maze_;
  std::vector<GridPos> free_;  // cached free cells for uniform starts
  double noise_ = 0.0;
  double step_max_ = 0.3;
  double tau_nei_ = 0.7;
  std::shared_ptr<const TabularMDP> mdp_;
};

}  // namespace ccap
