#include "ccap/env.hpp"

#include <cmath>
#include <limits>

#include "ccap/errors.hpp"

namespace ccap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kContactEps = 1e-9;
}  // namespace

std::optional<Move> Action::as_move() const {
  if (dx == 0.0 && dy == -1.0) return Move::Up;
  if (dx == 0.0 && dy == 1.0) return Move::Down;
  if (dx == -1.0 && dy == 0.0) return Move::Left;
  if (dx == 1.0 && dy == 0.0) return Move::Right;
  return std::nullopt;
}

Transition step_discrete(const MazeSpec& maze, GridPos s, Move a, double noise, Rng& rng,
                         std::optional<GridPos> goal) {
  if (!maze.is_free(s))
    throw InvalidState("state (" + std::to_string(s.row) + "," + std::to_string(s.col) +
                       ") is not a free cell");
  if (noise < 0.0 || noise > 0.5) throw InvalidState("slip noise must lie in [0, 0.5]");

  Move actual = a;
  if (noise > 0.0 && rng.next_double() < noise) {
    int r = rng.next_int(kNumMoves - 1);
    if (r >= static_cast<int>(a)) ++r;  // uniform over the other three moves
    actual = static_cast<Move>(r);
  }

  const GridPos d = move_delta(actual);
  GridPos next{s.row + d.row, s.col + d.col};
  if (!maze.is_free(next)) next = s;  // walls block, state unchanged

  Transition tr;
  tr.state = {static_cast<double>(s.col), static_cast<double>(s.row)};
  tr.action = Action::from_move(a);  // the commanded move; slip is env noise
  tr.next_state = {static_cast<double>(next.col), static_cast<double>(next.row)};
  const bool at_goal = goal.has_value() && next == *goal;
  tr.reward = at_goal ? 1.0 : 0.0;
  tr.done = at_goal;
  return tr;
}

bool position_free(const MazeSpec& maze, Vec2 p) {
  const int cx = static_cast<int>(std::floor(p.x));
  const int cy = static_cast<int>(std::floor(p.y));
  const bool on_x_line = p.x == std::floor(p.x);
  const bool on_y_line = p.y == std::floor(p.y);
  for (int dx = 0; dx >= (on_x_line ? -1 : 0); --dx)
    for (int dy = 0; dy >= (on_y_line ? -1 : 0); --dy)
      if (maze.is_free(cy + dy, cx + dx)) return true;
  return false;
}

namespace {

struct WallHit {
  double t = 0.0;
  int axis = 0;  // 0: vertical face (blocks x), 1: horizontal face (blocks y), 2: corner
};

bool wall_at(const MazeSpec& maze, int row, int col) { return !maze.is_free(row, col); }

// First t in [0, 1] at which p + t*d enters a wall cell, via grid traversal.
std::optional<WallHit> first_wall_hit(const MazeSpec& maze, Vec2 p, Vec2 d) {
  int cx = static_cast<int>(std::floor(p.x));
  int cy = static_cast<int>(std::floor(p.y));
  const int sx = d.x > 0 ? 1 : (d.x < 0 ? -1 : 0);
  const int sy = d.y > 0 ? 1 : (d.y < 0 ? -1 : 0);

  double tmax_x = kInf, tdel_x = kInf;
  double tmax_y = kInf, tdel_y = kInf;
  if (sx != 0) {
    const double line = sx > 0 ? cx + 1.0 : static_cast<double>(cx);
    tmax_x = (line - p.x) / d.x;
    tdel_x = 1.0 / std::abs(d.x);
  }
  if (sy != 0) {
    const double line = sy > 0 ? cy + 1.0 : static_cast<double>(cy);
    tmax_y = (line - p.y) / d.y;
    tdel_y = 1.0 / std::abs(d.y);
  }

  while (true) {
    if (tmax_x < tmax_y) {
      if (tmax_x > 1.0) return std::nullopt;
      cx += sx;
      if (wall_at(maze, cy, cx)) return WallHit{tmax_x, 0};
      tmax_x += tdel_x;
    } else if (tmax_y < tmax_x) {
      if (tmax_y > 1.0) return std::nullopt;
      cy += sy;
      if (wall_at(maze, cy, cx)) return WallHit{tmax_y, 1};
      tmax_y += tdel_y;
    } else {
      // Exactly through a grid corner (or no motion at all).
      if (tmax_x == kInf) return std::nullopt;
      if (tmax_x > 1.0) return std::nullopt;
      const int nx = cx + sx;
      const int ny = cy + sy;
      if (wall_at(maze, cy, nx)) return WallHit{tmax_x, 0};
      if (wall_at(maze, ny, cx)) return WallHit{tmax_y, 1};
      if (wall_at(maze, ny, nx)) return WallHit{tmax_x, 2};
      cx = nx;
      cy = ny;
      tmax_x += tdel_x;
      tmax_y += tdel_y;
    }
  }
}

Vec2 slide_move(const MazeSpec& maze, Vec2 p, Vec2 d) {
  for (int pass = 0; pass < 3; ++pass) {
    if (std::abs(d.x) < 1e-15 && std::abs(d.y) < 1e-15) break;
    const auto hit = first_wall_hit(maze, p, d);
    if (!hit) {
      p = p + d;
      break;
    }
    Vec2 contact = p + d * hit->t;
    Vec2 rem = d * (1.0 - hit->t);
    if (hit->axis == 0 || hit->axis == 2) {
      contact.x -= d.x > 0 ? kContactEps : -kContactEps;
      rem.x = 0.0;
    }
    if (hit->axis == 1 || hit->axis == 2) {
      contact.y -= d.y > 0 ? kContactEps : -kContactEps;
      rem.y = 0.0;
    }
    p = contact;
    d = rem;
  }
  return p;
}

}  // namespace

Transition step_continuous(const MazeSpec& maze, Vec2 s, Action a, Rng& /*rng*/,
                           std::optional<Vec2> goal, double goal_radius, double step_max) {
  if (!position_free(maze, s))
    throw InvalidState("position (" + std::to_string(s.x) + "," + std::to_string(s.y) +
                       ") is not inside the free area");
  const double n = a.norm();
  if (n > step_max && n > 0.0) {
    const double scale = step_max / n;
    a.dx *= scale;
    a.dy *= scale;
  }

  const Vec2 next = slide_move(maze, s, {a.dx, a.dy});

  Transition tr;
  tr.state = s;
  tr.action = a;
  tr.next_state = next;
  const bool at_goal = goal.has_value() && distance(next, *goal) < goal_radius;
  tr.reward = at_goal ? 1.0 : 0.0;
  tr.done = at_goal;
  return tr;
}

Env Env::discrete_maze(MazeSpec maze, double noise) {
  Env e;
  e.kind_ = EnvKind::DiscreteMaze;
  e.maze_ = std::move(maze);
  e.free_ = e.maze_.free_cells();
  e.noise_ = noise;
  return e;
}

Env Env::continuous_maze(MazeSpec maze, double step_max, double tau_nei) {
  Env e;
  e.kind_ = EnvKind::ContinuousMaze;
  e.maze_ = std::move(maze);
  e.free_ = e.maze_.free_cells();
  e.step_max_ = step_max;
  e.tau_nei_ = tau_nei;
  return e;
}

Env Env::tabular(TabularMDP mdp) {
  Env e;
  e.kind_ = EnvKind::Tabular;
  e.mdp_ = std::make_shared<TabularMDP>(std::move(mdp));
  return e;
}

const TabularMDP& Env::mdp() const {
  if (!mdp_) throw InvalidState("environment has no tabular model");
  return *mdp_;
}

std::string Env::tag() const {
  switch (kind_) {
    case EnvKind::DiscreteMaze:
      return "grid:" + std::to_string(maze_.width) + "x" + std::to_string(maze_.height);
    case EnvKind::ContinuousMaze:
      return "cont:" + std::to_string(maze_.width) + "x" + std::to_string(maze_.height);
    default:
      return "tabular:" + std::to_string(mdp_->n_states) + "x" + std::to_string(mdp_->n_actions);
  }
}

Vec2 Env::random_start(Rng& rng) const {
  if (kind_ == EnvKind::Tabular)
    return {static_cast<double>(rng.next_int(mdp_->n_states)), 0.0};
  const GridPos cell = free_[static_cast<size_t>(rng.next_int(static_cast<int>(free_.size())))];
  if (kind_ == EnvKind::DiscreteMaze)
    return {static_cast<double>(cell.col), static_cast<double>(cell.row)};
  constexpr double kMargin = 1e-6;
  return {cell.col + rng.uniform(kMargin, 1.0 - kMargin),
          cell.row + rng.uniform(kMargin, 1.0 - kMargin)};
}

Action Env::random_action(Rng& rng) const {
  switch (kind_) {
    case EnvKind::DiscreteMaze:
      return Action::from_move(static_cast<Move>(rng.next_int(kNumMoves)));
    case EnvKind::Tabular:
      return {static_cast<double>(rng.next_int(mdp_->n_actions)), 0.0};
    default: {
      // uniform over the step ball
      const double ang = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
      const double r = step_max_ * std::sqrt(rng.next_double());
      return {r * std::cos(ang), r * std::sin(ang)};
    }
  }
}

Transition Env::step(Vec2 s, const Action& a, Rng& rng, std::optional<Vec2> goal) const {
  switch (kind_) {
    case EnvKind::DiscreteMaze: {
      const GridPos cell{static_cast<int>(s.y), static_cast<int>(s.x)};
      const auto mv = a.as_move();
      if (!mv) throw InvalidState("discrete env requires a compass move");
      std::optional<GridPos> g;
      if (goal) g = GridPos{static_cast<int>(goal->y), static_cast<int>(goal->x)};
      return step_discrete(maze_, cell, *mv, noise_, rng, g);
    }
    case EnvKind::ContinuousMaze:
      return step_continuous(maze_, s, a, rng, goal, tau_nei_, step_max_);
    default: {
      const int st = static_cast<int>(s.x);
      const int act = static_cast<int>(a.dx);
      const int next = sample_next(*mdp_, st, act, rng);
      Transition tr;
      tr.state = s;
      tr.action = a;
      tr.next_state = {static_cast<double>(next), 0.0};
      return tr;
    }
  }
}

StateKey Env::state_key(Vec2 s) const {
  if (kind_ == EnvKind::ContinuousMaze) return key_from_position(s, tau_nei_);
  return {static_cast<int32_t>(s.x), static_cast<int32_t>(s.y)};
}

Vec2 Env::key_position(StateKey k) const {
  if (kind_ == EnvKind::ContinuousMaze)
    return {(k.kx + 0.5) * tau_nei_, (k.ky + 0.5) * tau_nei_};
  return {static_cast<double>(k.kx), static_cast<double>(k.ky)};
}

bool Env::at_goal(Vec2 s, Vec2 goal) const {
  if (kind_ == EnvKind::ContinuousMaze) return distance(s, goal) < tau_nei_;
  return s.x == goal.x && s.y == goal.y;
}

}  // namespace ccap
