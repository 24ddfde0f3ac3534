#include "ccap/maze.hpp"

#include <fstream>
#include <sstream>

#include "ccap/errors.hpp"

namespace ccap {

std::vector<GridPos> MazeSpec::free_cells() const {
  std::vector<GridPos> out;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      if (at(r, c) == Cell::Free) out.push_back({r, c});
  return out;
}

int MazeSpec::free_cell_count() const {
  int n = 0;
  for (Cell c : cells) n += (c == Cell::Free);
  return n;
}

int MazeSpec::free_neighbor_count(GridPos p) const {
  int n = 0;
  n += is_free(p.row - 1, p.col);
  n += is_free(p.row + 1, p.col);
  n += is_free(p.row, p.col - 1);
  n += is_free(p.row, p.col + 1);
  return n;
}

MazeSpec parse_maze(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  if (lines.empty()) throw InvalidMaze("empty maze text");
  const size_t w = lines[0].size();
  for (size_t i = 1; i < lines.size(); ++i)
    if (lines[i].size() != w)
      throw RaggedGrid("row " + std::to_string(i + 1) + " has length " +
                       std::to_string(lines[i].size()) + ", expected " + std::to_string(w));

  MazeSpec m;
  m.height = static_cast<int>(lines.size());
  m.width = static_cast<int>(w);
  if (m.width < 3 || m.height < 3)
    throw InvalidMaze("maze must be at least 3x3, got " + std::to_string(m.width) + "x" +
                      std::to_string(m.height));
  m.cells.resize(static_cast<size_t>(m.width) * m.height);

  for (int r = 0; r < m.height; ++r) {
    for (int c = 0; c < m.width; ++c) {
      const char ch = lines[static_cast<size_t>(r)][static_cast<size_t>(c)];
      Cell cell;
      switch (ch) {
        case '#':
          cell = Cell::Wall;
          break;
        case '.':
          cell = Cell::Free;
          break;
        case 'S':
          cell = Cell::Free;
          m.start = GridPos{r, c};
          break;
        case 'G':
          cell = Cell::Free;
          m.goal = GridPos{r, c};
          break;
        default:
          throw UnknownChar(std::string("unknown maze character '") + ch + "' at row " +
                            std::to_string(r + 1) + ", col " + std::to_string(c + 1));
      }
      const bool boundary = r == 0 || r == m.height - 1 || c == 0 || c == m.width - 1;
      if (boundary && cell != Cell::Wall)
        throw InvalidMaze("boundary cell at row " + std::to_string(r + 1) + ", col " +
                          std::to_string(c + 1) + " must be a wall");
      m.cells[static_cast<size_t>(r) * m.width + c] = cell;
    }
  }

  if (m.free_cell_count() == 0) throw NoFreeCell("maze has no free cell");
  return m;
}

std::string format_maze(const MazeSpec& maze) {
  std::string out;
  out.reserve(static_cast<size_t>(maze.height) * (maze.width + 1));
  for (int r = 0; r < maze.height; ++r) {
    for (int c = 0; c < maze.width; ++c) {
      char ch = maze.at(r, c) == Cell::Wall ? '#' : '.';
      if (maze.start && maze.start->row == r && maze.start->col == c) ch = 'S';
      if (maze.goal && maze.goal->row == r && maze.goal->col == c) ch = 'G';
      out.push_back(ch);
    }
    out.push_back('\n');
  }
  return out;
}

MazeSpec load_maze_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open maze file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_maze(ss.str());
}

}  // namespace ccap
