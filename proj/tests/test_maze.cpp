#include <doctest.h>

#include "ccap/errors.hpp"
#include "ccap/fixtures.hpp"
#include "ccap/maze.hpp"
#include "ccap/rng.hpp"

using namespace ccap;

TEST_SUITE_BEGIN("maze");

TEST_CASE("corridor parses to a 1x3 free row") {
  const MazeSpec m = parse_maze("#####\n#...#\n#####");
  CHECK(m.width == 5);
  CHECK(m.height == 3);
  CHECK(m.free_cell_count() == 3);
  for (int c = 1; c <= 3; ++c) CHECK(m.is_free(1, c));
  CHECK_FALSE(m.is_free(0, 1));
}

TEST_CASE("single free cell has no neighbours") {
  const MazeSpec m = parse_maze("###\n#.#\n###");
  CHECK(m.free_cell_count() == 1);
  CHECK(m.free_neighbor_count({1, 1}) == 0);
}

TEST_CASE("start and goal markers are free cells and recorded") {
  const MazeSpec m = parse_maze("#####\n#S.G#\n#####");
  REQUIRE(m.start.has_value());
  REQUIRE(m.goal.has_value());
  CHECK(*m.start == GridPos{1, 1});
  CHECK(*m.goal == GridPos{1, 3});
  CHECK(m.free_cell_count() == 3);
}

TEST_CASE("parse rejects bad input") {
  CHECK_THROWS_AS(parse_maze("####\n#.#\n####"), RaggedGrid);
  CHECK_THROWS_AS(parse_maze("###\n#x#\n###"), UnknownChar);
  CHECK_THROWS_AS(parse_maze("###\n###\n###"), NoFreeCell);
  CHECK_THROWS_AS(parse_maze("##\n##"), InvalidMaze);          // too small
  CHECK_THROWS_AS(parse_maze("###\n#..\n###"), InvalidMaze);   // open boundary
}

TEST_CASE("demo maze junctions are exactly the degree-3 cells") {
  // Enumeration oracle: junctions are the cells with 3 free neighbours.
  const MazeSpec m = parse_maze(fixtures::demo_maze_text());
  CHECK(m.width == 11);
  CHECK(m.height == 11);
  std::vector<GridPos> junctions, dead_ends;
  for (const GridPos& p : m.free_cells()) {
    const int d = m.free_neighbor_count(p);
    if (d >= 3) junctions.push_back(p);
    if (d == 1) dead_ends.push_back(p);
  }
  const std::vector<GridPos> expected_junctions = {
      {3, 9}, {5, 3}, {5, 7}, {7, 3}, {9, 3}};
  CHECK(junctions == expected_junctions);
  CHECK(dead_ends == std::vector<GridPos>{{7, 5}});
  for (const GridPos& p : junctions) CHECK(m.free_neighbor_count(p) == 3);
}

TEST_CASE("format(parse(text)) reproduces the layout") {
  for (const std::string& text :
       {fixtures::demo_maze_text(), fixtures::large_maze_text(), fixtures::t_maze_text(),
        fixtures::u_maze_text(), fixtures::corridor_text(7)}) {
    CHECK(format_maze(parse_maze(text)) == text);
  }
}

TEST_CASE("round trip holds on random mazes") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const MazeSpec m = fixtures::random_maze(4 + seed % 9, 4 + seed % 7, 0.35, seed);
    const std::string text = format_maze(m);
    CHECK(format_maze(parse_maze(text)) == text);
  }
}

TEST_SUITE_END();
