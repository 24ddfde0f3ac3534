#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>

namespace ccap {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

enum class Metric { Euclidean, Manhattan };

inline double distance(const Vec2& a, const Vec2& b, Metric m = Metric::Euclidean) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return m == Metric::Euclidean ? std::sqrt(dx * dx + dy * dy)
                                : std::abs(dx) + std::abs(dy);
}

/// Grid cell address. Row 0 is the top line of the ASCII maze.
struct GridPos {
  int row = 0;
  int col = 0;
  auto operator<=>(const GridPos&) const = default;
};

/// Discretized state key: cell indices for grid states, bin indices for
/// continuous states. Ordered so serialized tables have a stable layout.
struct StateKey {
  int32_t kx = 0;  // column / x bin
  int32_t ky = 0;  // row / y bin
  auto operator<=>(const StateKey&) const = default;

  uint64_t packed() const {
    return (static_cast<uint64_t>(static_cast<uint32_t>(kx)) << 32) |
           static_cast<uint64_t>(static_cast<uint32_t>(ky));
  }
};

struct StateKeyHash {
  size_t operator()(const StateKey& k) const {
    uint64_t v = k.packed();
    v ^= v >> 33;
    v *= 0xff51afd7ed558ccdull;
    v ^= v >> 33;
    return static_cast<size_t>(v);
  }
};

inline StateKey key_from_cell(GridPos p) { return {p.col, p.row}; }

/// Bins a continuous position with the given bin width.
inline StateKey key_from_position(Vec2 p, double bin_width) {
  return {static_cast<int32_t>(std::floor(p.x / bin_width)),
          static_cast<int32_t>(std::floor(p.y / bin_width))};
}

}  // namespace ccap
