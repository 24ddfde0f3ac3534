#pragma once

#include <span>
#include <string>

#include "ccap/capacity.hpp"
#include "ccap/maze.hpp"
#include "ccap/rl.hpp"
#include "ccap/subgoals.hpp"

namespace ccap {

/// Binary P6 pixmap of a per-cell value map over the maze: blue (low) to
/// red (high) ramp, walls black, low-confidence cells gray, uncovered free
/// cells white. Byte-deterministic for identical input.
void render_heatmap(const std::string& out_path, const MazeSpec& maze, const CapacityMap& map,
                    int scale = 12);

/// Categorical region coloring with subgoal anchor cells marked yellow.
void render_regions(const std::string& out_path, const MazeSpec& maze,
                    const SubgoalGraph& graph, int scale = 12);

/// Minimal SVG line chart of a learning curve.
void render_curve_svg(const std::string& out_path, std::span<const CurvePoint> curve);

}  // namespace ccap
