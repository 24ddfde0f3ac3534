#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccap/geometry.hpp"

namespace ccap {

enum class Cell : uint8_t { Wall = 0, Free = 1 };

/// Rectangular maze: boundary cells are walls, interior cells are Wall or
/// Free. Immutable value data once parsed.
struct MazeSpec {
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;  // row-major
  std::optional<GridPos> start;
  std::optional<GridPos> goal;

  Cell at(int row, int col) const { return cells[static_cast<size_t>(row) * width + col]; }
  bool in_bounds(int row, int col) const {
    return row >= 0 && row < height && col >= 0 && col < width;
  }
  bool is_free(int row, int col) const { return in_bounds(row, col) && at(row, col) == Cell::Free; }
  bool is_free(GridPos p) const { return is_free(p.row, p.col); }

  std::vector<GridPos> free_cells() const;
  int free_cell_count() const;
  /// Number of 4-neighbours that are Free (junction test: >= 3).
  int free_neighbor_count(GridPos p) const;
};

/// Parses the ASCII maze format: '#' wall, '.' free, 'S'/'G' free cells
/// recorded as start/goal markers. Rows must be equal length; the border
/// must be all walls; grid must be at least 3x3 with one free cell.
MazeSpec parse_maze(std::string_view text);

/// Inverse of parse_maze for the Wall/Free layout (markers included).
std::string format_maze(const MazeSpec& maze);

MazeSpec load_maze_file(const std::string& path);

}  // namespace ccap
