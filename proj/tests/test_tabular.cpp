#include <doctest.h>

#include <cmath>

#include "ccap/env.hpp"
#include "ccap/errors.hpp"
#include "ccap/fixtures.hpp"
#include "ccap/tabular.hpp"

using namespace ccap;

TEST_SUITE_BEGIN("tabular");

TEST_CASE("1x3 corridor, noise 0: middle state moves or self-loops") {
  const MazeSpec m = parse_maze(fixtures::corridor_text(3));
  const TabularMDP mdp = build_tabular(m, 0.0);
  REQUIRE(mdp.n_states == 3);
  REQUIRE(mdp.n_actions == 4);
  // states enumerate free cells row-major: 0=(1,1), 1=(1,2), 2=(1,3)
  const int mid = 1;
  CHECK(mdp.prob(mid, static_cast<int>(Move::Left), 0) == 1.0);
  CHECK(mdp.prob(mid, static_cast<int>(Move::Right), 2) == 1.0);
  CHECK(mdp.prob(mid, static_cast<int>(Move::Up), mid) == 1.0);
  CHECK(mdp.prob(mid, static_cast<int>(Move::Down), mid) == 1.0);
}

TEST_CASE("every row sums to 1") {
  const TabularMDP a = build_tabular(parse_maze(fixtures::demo_maze_text()), 0.0);
  const TabularMDP b = build_tabular(parse_maze(fixtures::demo_maze_text()), 0.2);
  CHECK(a.stochastic());
  CHECK(b.stochastic());
}

TEST_CASE("slip row at a junction expands the noise definition") {
  // Junction (5,3) of the demo maze has free neighbours up, right, down and
  // a wall to the left. Under a=Up with noise 0.2 the up-neighbour gets
  // 0.8 and each other direction's target gets 0.2/3 (self for the blocked
  // left move).
  const MazeSpec m = parse_maze(fixtures::demo_maze_text());
  const TabularMDP mdp = build_tabular(m, 0.2);
  const auto index = state_index_map(mdp);
  const int s = index.at(key_from_cell({5, 3}).packed());
  const int up = index.at(key_from_cell({4, 3}).packed());
  const int down = index.at(key_from_cell({6, 3}).packed());
  const int right = index.at(key_from_cell({5, 4}).packed());

  CHECK(mdp.prob(s, static_cast<int>(Move::Up), up) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(mdp.prob(s, static_cast<int>(Move::Up), down) ==
        doctest::Approx(0.2 / 3.0).epsilon(1e-12));
  CHECK(mdp.prob(s, static_cast<int>(Move::Up), right) ==
        doctest::Approx(0.2 / 3.0).epsilon(1e-12));
  CHECK(mdp.prob(s, static_cast<int>(Move::Up), s) ==
        doctest::Approx(0.2 / 3.0).epsilon(1e-12));  // blocked left collapses to self
}

TEST_CASE("random_tabular with branching 1 is deterministic") {
  const TabularMDP mdp = random_tabular(4, 2, 1, 7);
  for (int s = 0; s < 4; ++s)
    for (int a = 0; a < 2; ++a) {
      int ones = 0;
      for (int s2 = 0; s2 < 4; ++s2) {
        const double p = mdp.prob(s, a, s2);
        CHECK((p == 0.0 || p == 1.0));
        ones += p == 1.0;
      }
      CHECK(ones == 1);
    }
}

TEST_CASE("random_tabular is reproducible and stochastic") {
  const TabularMDP a = random_tabular(50, 4, 3, 1);
  const TabularMDP b = random_tabular(50, 4, 3, 1);
  CHECK(a.p == b.p);
  for (int s = 0; s < a.n_states; ++s)
    for (int act = 0; act < a.n_actions; ++act) {
      double sum = 0.0;
      for (double v : a.row(s, act)) sum += v;
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("random_tabular rejects bad dims") {
  CHECK_THROWS_AS(random_tabular(1, 2, 1, 0), BadDims);
  CHECK_THROWS_AS(random_tabular(4, 1, 1, 0), BadDims);
  CHECK_THROWS_AS(random_tabular(4, 2, 0, 0), BadDims);
}

TEST_CASE("empirical step frequencies converge to the tensor rows") {
  const MazeSpec m = parse_maze(fixtures::demo_maze_text());
  const double noise = 0.2;
  const TabularMDP mdp = build_tabular(m, noise);
  const auto index = state_index_map(mdp);

  const GridPos cell{5, 5};  // mid-corridor cell
  const int s = index.at(key_from_cell(cell).packed());
  Rng rng(99);
  const long n = 100000;
  std::vector<long> counts(static_cast<size_t>(mdp.n_states), 0);
  for (long i = 0; i < n; ++i) {
    const Transition tr = step_discrete(m, cell, Move::Right, noise, rng);
    const GridPos next{static_cast<int>(tr.next_state.y), static_cast<int>(tr.next_state.x)};
    ++counts[static_cast<size_t>(index.at(key_from_cell(next).packed()))];
  }
  for (int s2 = 0; s2 < mdp.n_states; ++s2) {
    const double expected = mdp.prob(s, static_cast<int>(Move::Right), s2);
    const double got = counts[static_cast<size_t>(s2)] / double(n);
    CHECK(std::abs(got - expected) < 0.01);
  }
}

TEST_CASE("sample_next follows the row distribution") {
  const TabularMDP mdp = random_tabular(6, 3, 3, 21);
  Rng rng(5);
  std::vector<long> counts(6, 0);
  const long n = 200000;
  for (long i = 0; i < n; ++i) ++counts[static_cast<size_t>(sample_next(mdp, 2, 1, rng))];
  for (int s2 = 0; s2 < 6; ++s2)
    CHECK(std::abs(counts[static_cast<size_t>(s2)] / double(n) - mdp.prob(2, 1, s2)) < 0.01);
}

TEST_SUITE_END();
