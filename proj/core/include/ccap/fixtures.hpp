#pragma once

#include <cstdint>
#include <string>

#include "ccap/maze.hpp"

namespace ccap::fixtures {

/// 11x11 corridor maze with five three-way junctions and one dead end; the
/// headline demo map.
std::string demo_maze_text();

/// 17x17 analog of the large maze benchmark: four junctions, long corridors.
std::string large_maze_text();

/// Small T shape for the continuous clustering fixtures: one junction,
/// three dead-end arms.
std::string t_maze_text();

/// Open room with a U-shaped obstacle between start and goal; the fixture
/// where a straight-line potential stalls and the concatenated one does not.
std::string u_maze_text();

/// 1 x n corridor (plus walls).
std::string corridor_text(int n);

/// Seeded random maze for fuzz suites: walled border, interior walls at the
/// given density, at least two free cells guaranteed.
MazeSpec random_maze(int width, int height, double wall_density, uint64_t seed);

}  // namespace ccap::fixtures
