#pragma once

#include <cmath>

#include "circumnav/errors.hpp"

namespace circumnav {

// Coordinate convention used throughout: x-right, y-up. "Clockwise" in this
// frame maps [x, y] -> [y, -x]. The tangential direction's sign sets the
// orbit direction, so this convention is fixed globally.

constexpr double kZeroRangeThreshold = 1e-9;  // [m] below this a bearing is undefined

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

// Unit vector from the agent toward the target.
struct Bearing {
  Vec2 dir;  // unit norm within 1e-9
};

// target_pos - agent_pos; the displacement the estimator tries to recover.
inline Vec2 displacement(Vec2 target_pos, Vec2 agent_pos) {
  return target_pos - agent_pos;
}

// Unit bearing from agent to target. Undefined (throws) at zero range.
inline Bearing unit_bearing(Vec2 target_pos, Vec2 agent_pos) {
  Vec2 d = displacement(target_pos, agent_pos);
  double range = d.norm();
  if (range <= kZeroRangeThreshold) throw CoincidentPositions();
  return Bearing{d * (1.0 / range)};
}

// Rotate a unit bearing clockwise by pi/2: [x, y] -> [y, -x].
inline Bearing perpendicular_cw(Bearing b) {
  return Bearing{{b.dir.y, -b.dir.x}};
}

}  // namespace circumnav
