#include <doctest.h>

#include <array>
#include <cmath>

#include "ccap/env.hpp"
#include "ccap/errors.hpp"
#include "ccap/fixtures.hpp"

using namespace ccap;

TEST_SUITE_BEGIN("env");

TEST_CASE("move into a wall leaves the state unchanged") {
  const MazeSpec m = parse_maze(fixtures::corridor_text(3));
  Rng rng(0);
  const Transition tr = step_discrete(m, {1, 2}, Move::Up, 0.0, rng);
  CHECK(tr.next_state.x == 2.0);
  CHECK(tr.next_state.y == 1.0);
  CHECK(tr.reward == 0.0);
  CHECK_FALSE(tr.done);
}

TEST_CASE("deterministic move goes one cell over") {
  const MazeSpec m = parse_maze(fixtures::demo_maze_text());
  Rng rng(0);
  // (5,3) is a junction; right is open
  const Transition tr = step_discrete(m, {5, 3}, Move::Right, 0.0, rng);
  CHECK(tr.next_state.x == 4.0);
  CHECK(tr.next_state.y == 5.0);
}

TEST_CASE("goal entry pays 1 and terminates") {
  const MazeSpec m = parse_maze(fixtures::corridor_text(3));
  Rng rng(0);
  const Transition tr = step_discrete(m, {1, 2}, Move::Right, 0.0, rng, GridPos{1, 3});
  CHECK(tr.reward == 1.0);
  CHECK(tr.done);
}

TEST_CASE("invalid state is rejected") {
  const MazeSpec m = parse_maze(fixtures::corridor_text(3));
  Rng rng(0);
  CHECK_THROWS_AS(step_discrete(m, {0, 0}, Move::Up, 0.0, rng), InvalidState);
}

TEST_CASE("slip noise matches the binomial expectation") {
  // noise=0.2: commanded direction 0.8, each other direction 0.2/3.
  const MazeSpec m = parse_maze(
      "#####\n"
      "#...#\n"
      "#...#\n"
      "#...#\n"
      "#####");
  Rng rng(7);
  const GridPos center{2, 2};
  std::array<long, 4> hits{};  // up, down, left, right
  const long n = 100000;
  for (long i = 0; i < n; ++i) {
    const Transition tr = step_discrete(m, center, Move::Up, 0.2, rng);
    const int dy = static_cast<int>(tr.next_state.y) - center.row;
    const int dx = static_cast<int>(tr.next_state.x) - center.col;
    if (dy == -1) ++hits[0];
    if (dy == 1) ++hits[1];
    if (dx == -1) ++hits[2];
    if (dx == 1) ++hits[3];
  }
  CHECK(std::abs(hits[0] / double(n) - 0.8) < 0.01);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(hits[i] / double(n) - 0.2 / 3.0) < 0.01);
}

TEST_CASE("continuous free move adds the displacement") {
  const MazeSpec m = parse_maze(fixtures::u_maze_text());
  Rng rng(0);
  const Transition tr = step_continuous(m, {5.0, 8.5}, {0.25, 0.0}, rng, {}, 0.7, 0.3);
  CHECK(tr.next_state.x == doctest::Approx(5.25).epsilon(1e-12));
  CHECK(tr.next_state.y == doctest::Approx(8.5).epsilon(1e-12));
}

TEST_CASE("action norm is clipped to step_max") {
  const MazeSpec m = parse_maze(fixtures::u_maze_text());
  Rng rng(0);
  const Transition tr = step_continuous(m, {5.0, 8.5}, {3.0, 4.0}, rng, {}, 0.7, 0.3);
  const double moved = distance(tr.next_state, tr.state);
  CHECK(moved == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("head-on wall 0.1 away: displacement is 0.1, remainder cancelled") {
  // Inside the pocket at (4.5, 5.1); the wall face above sits at y = 5.0.
  const MazeSpec m = parse_maze(fixtures::u_maze_text());
  Rng rng(0);
  const Vec2 start{4.5, 5.1};
  const Transition tr = step_continuous(m, start, {0.0, -0.3}, rng, {}, 0.7, 0.3);
  CHECK(tr.next_state.x == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(tr.next_state.y == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(tr.next_state.y > 5.0);  // strictly off the face
  CHECK(position_free(m, tr.next_state));
}

TEST_CASE("analytic slide: blocked axis cancelled, free axis keeps moving") {
  // Straight into the inner wall block (cells rows 4..6, col 3..7 walls at
  // row 4). From (4.5, 3.8) moving (+0.1, +0.3): the y axis hits the face
  // y=4.0 after t=2/3 of the step; x continues for the remainder.
  const MazeSpec m = parse_maze(fixtures::u_maze_text());
  Rng rng(0);
  const Vec2 start{4.5, 3.8};
  const Transition tr = step_continuous(m, start, {0.1, 0.3}, rng, {}, 0.7, 0.3);
  CHECK(tr.next_state.x == doctest::Approx(4.6).epsilon(1e-9));
  CHECK(tr.next_state.y == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(tr.next_state.y < 4.0);  // strictly outside the wall
  CHECK(position_free(m, tr.next_state));
}

TEST_CASE("fuzz: steps never land inside a wall") {
  const MazeSpec m = parse_maze(fixtures::u_maze_text());
  const Env env = Env::continuous_maze(m, 0.3, 0.7);
  Rng rng(123);
  Vec2 s = env.random_start(rng);
  for (int i = 0; i < 20000; ++i) {
    const Transition tr = env.step(s, env.random_action(rng), rng);
    REQUIRE(position_free(m, tr.next_state));
    s = tr.next_state;
  }
}

TEST_CASE("discrete fuzz: states stay on free cells") {
  const MazeSpec m = parse_maze(fixtures::demo_maze_text());
  const Env env = Env::discrete_maze(m, 0.3);
  Rng rng(5);
  Vec2 s = env.random_start(rng);
  for (int i = 0; i < 20000; ++i) {
    const Transition tr = env.step(s, env.random_action(rng), rng);
    REQUIRE(m.is_free(static_cast<int>(tr.next_state.y), static_cast<int>(tr.next_state.x)));
    s = tr.next_state;
  }
}

TEST_SUITE_END();
