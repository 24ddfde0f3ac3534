#include "ccap/fixtures.hpp"

#include "ccap/rng.hpp"

namespace ccap::fixtures {

std::string demo_maze_text() {
  return "###########\n"
         "#...#.....#\n"
         "#.#.#.###.#\n"
         "#.#...#...#\n"
         "#.#####.#.#\n"
         "#.......#.#\n"
         "###.###.#.#\n"
         "#...#.#.#.#\n"
         "#.#.#.#.#.#\n"
         "#.....#...#\n"
         "###########\n";
}

std::string large_maze_text() {
  return "#################\n"
         "#.......#.......#\n"
         "#.#####.#.#####.#\n"
         "#.#...#.#.#...#.#\n"
         "#.#.#.#.#.#.#.#.#\n"
         "#...#.#.#.#.#...#\n"
         "###.#.#.#.#.#.###\n"
         "#...#.#...#.#...#\n"
         "#.###.#####.###.#\n"
         "#...#.#...#.#...#\n"
         "###.#.#.#.#.#.###\n"
         "#...#.#.#.#.#...#\n"
         "#.#.#.#.#.#.#.#.#\n"
         "#.#...#.#.#...#.#\n"
         "#.#####.#.#####.#\n"
         "#.......#.......#\n"
         "#################\n";
}

std::string t_maze_text() {
  return "#######\n"
         "#.....#\n"
         "###.###\n"
         "###.###\n"
         "###.###\n"
         "#######\n";
}

std::string u_maze_text() {
  return "###########\n"
         "#.........#\n"
         "#....G....#\n"
         "#.........#\n"
         "#..#####..#\n"
         "#..#...#..#\n"
         "#..#...#..#\n"
         "#.........#\n"
         "#....S....#\n"
         "#.........#\n"
         "###########\n";
}

std::string corridor_text(int n) {
  std::string wall(static_cast<size_t>(n) + 2, '#');
  std::string mid = "#" + std::string(static_cast<size_t>(n), '.') + "#";
  return wall + "\n" + mid + "\n" + wall + "\n";
}

MazeSpec random_maze(int width, int height, double wall_density, uint64_t seed) {
  Rng rng(seed);
  std::string text;
  int free_cells = 0;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const bool border = r == 0 || r == height - 1 || c == 0 || c == width - 1;
      bool wall = border || rng.next_double() < wall_density;
      if (!border && free_cells < 2 && r == height - 2 && c >= width - 3) wall = false;
      text.push_back(wall ? '#' : '.');
      free_cells += !wall;
    }
    text.push_back('\n');
  }
  return parse_maze(text);
}

}  // namespace ccap::fixtures
