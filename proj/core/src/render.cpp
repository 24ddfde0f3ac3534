#include "ccap/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ccap/errors.hpp"
#include "ccap/io_util.hpp"

namespace ccap {

namespace {

struct Rgb {
  uint8_t r = 0, g = 0, b = 0;
};

void write_ppm(const std::string& path, int width, int height,
               const std::vector<Rgb>& pixels) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << "P6\n" << width << " " << height << "\n255\n";
  f.write(reinterpret_cast<const char*>(pixels.data()),
          static_cast<std::streamsize>(pixels.size() * sizeof(Rgb)));
  if (!f) throw IoError("write failed: " + path);
}

Rgb ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return {static_cast<uint8_t>(std::lround(255.0 * t)), 40,
          static_cast<uint8_t>(std::lround(255.0 * (1.0 - t)))};
}

constexpr Rgb kWall{0, 0, 0};
constexpr Rgb kUncovered{255, 255, 255};
constexpr Rgb kLowConfidence{128, 128, 128};
constexpr Rgb kAnchor{255, 220, 0};

const Rgb kPalette[12] = {{230, 60, 60},  {60, 120, 230}, {60, 180, 90},  {230, 170, 50},
                          {150, 80, 200}, {80, 200, 200}, {230, 100, 180}, {120, 120, 60},
                          {90, 90, 220},  {200, 120, 80}, {60, 160, 160}, {170, 210, 70}};

std::vector<Rgb> upscale(const MazeSpec& maze, const std::vector<Rgb>& cell_colors, int scale) {
  std::vector<Rgb> pixels(static_cast<size_t>(maze.width) * scale * maze.height * scale);
  const int pw = maze.width * scale;
  for (int r = 0; r < maze.height; ++r)
    for (int c = 0; c < maze.width; ++c) {
      const Rgb color = cell_colors[static_cast<size_t>(r) * maze.width + c];
      for (int dy = 0; dy < scale; ++dy)
        for (int dx = 0; dx < scale; ++dx)
          pixels[static_cast<size_t>(r * scale + dy) * pw + c * scale + dx] = color;
    }
  return pixels;
}

// Map entry for a cell: exact key for grid-keyed maps, else the bin holding
// the cell center.
const CapacityEntry* entry_for_cell(const CapacityMap& map, GridPos cell) {
  StateKey key{cell.col, cell.row};
  if (map.bin_width > 0.0) key = key_from_position(cell_center(cell), map.bin_width);
  const auto it = map.states.find(key);
  return it == map.states.end() ? nullptr : &it->second;
}

}  // namespace

void render_heatmap(const std::string& out_path, const MazeSpec& maze, const CapacityMap& map,
                    int scale) {
  if (map.states.empty()) throw BadInput("render_heatmap: empty map");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [key, e] : map.states) {
    if (e.low_confidence) continue;
    lo = std::min(lo, e.capacity);
    hi = std::max(hi, e.capacity);
  }
  const bool flat = !(hi > lo);

  std::vector<Rgb> cells(static_cast<size_t>(maze.width) * maze.height, kWall);
  for (int r = 0; r < maze.height; ++r)
    for (int c = 0; c < maze.width; ++c) {
      if (!maze.is_free(r, c)) continue;
      Rgb color = kUncovered;
      const CapacityEntry* e = entry_for_cell(map, {r, c});
      if (e != nullptr)
        color = e->low_confidence
                    ? kLowConfidence
                    : ramp(flat ? 0.0 : (e->capacity - lo) / (hi - lo));
      cells[static_cast<size_t>(r) * maze.width + c] = color;
    }
  write_ppm(out_path, maze.width * scale, maze.height * scale, upscale(maze, cells, scale));
}

void render_regions(const std::string& out_path, const MazeSpec& maze, const SubgoalGraph& graph,
                    int scale) {
  std::vector<Rgb> cells(static_cast<size_t>(maze.width) * maze.height, kWall);
  for (int r = 0; r < maze.height; ++r)
    for (int c = 0; c < maze.width; ++c) {
      if (!maze.is_free(r, c)) continue;
      StateKey key{c, r};
      if (graph.bin_width > 0.0) key = key_from_position(cell_center({r, c}), graph.bin_width);
      const auto it = graph.region.find(key);
      cells[static_cast<size_t>(r) * maze.width + c] =
          it == graph.region.end() ? kUncovered
                                   : kPalette[static_cast<size_t>(it->second) % 12];
    }
  for (const Subgoal& g : graph.subgoals.goals) {
    const int col = static_cast<int>(g.anchor.x);
    const int row = static_cast<int>(g.anchor.y);
    if (maze.in_bounds(row, col)) cells[static_cast<size_t>(row) * maze.width + col] = kAnchor;
  }
  write_ppm(out_path, maze.width * scale, maze.height * scale, upscale(maze, cells, scale));
}

void render_curve_svg(const std::string& out_path, std::span<const CurvePoint> curve) {
  if (curve.empty()) throw BadInput("render_curve_svg: empty curve");
  const double width = 640.0, height = 400.0, margin = 40.0;
  const double max_ep = std::max(1, curve.back().episode);

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
         "viewBox=\"0 0 640 400\">\n";
  svg += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg += "<line x1=\"40\" y1=\"360\" x2=\"600\" y2=\"360\" stroke=\"black\"/>\n";
  svg += "<line x1=\"40\" y1=\"40\" x2=\"40\" y2=\"360\" stroke=\"black\"/>\n";
  svg += "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"2\" points=\"";
  for (const CurvePoint& p : curve) {
    const double x = margin + (width - 2 * margin) * (p.episode / max_ep);
    const double y = height - margin - (height - 2 * margin) * std::clamp(p.success, 0.0, 1.0);
    svg += fmt_double(std::round(x * 100.0) / 100.0);
    svg += ',';
    svg += fmt_double(std::round(y * 100.0) / 100.0);
    svg += ' ';
  }
  svg += "\"/>\n</svg>\n";

  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + out_path);
  f << svg;
  if (!f) throw IoError("write failed: " + out_path);
}

}  // namespace ccap
