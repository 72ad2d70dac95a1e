// Copyright 2026 The safemetric Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Planar oriented-box geometry on the ground plane (bird's-eye view).
//
// Image-space boxes use the same types with pixel units and yaw = 0.

#ifndef SAFEMETRIC_GEOMETRY_HPP_
#define SAFEMETRIC_GEOMETRY_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace safemetric {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double rad) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(rad, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  if (r > std::numbers::pi) r -= kTwoPi;
  return r;
}

/// Rectangle with its length along the heading `yaw`.
struct OrientedBox {
  double center_x = 0.0;
  double center_y = 0.0;
  double length = 1.0;
  double width = 1.0;
  double yaw = 0.0;

  Vec2 center() const { return {center_x, center_y}; }

  bool is_valid() const {
    return std::isfinite(center_x) && std::isfinite(center_y) &&
           std::isfinite(yaw) && length > 0.0 && width > 0.0 &&
           std::isfinite(length) && std::isfinite(width);
  }

  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;
};

struct EvaluationRange {
  double max_distance = 100.0;
};

using Polygon = std::vector<Vec2>;

/// Corners in counter-clockwise order.
inline std::array<Vec2, 4> corners(const OrientedBox& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.length;
  const double hw = 0.5 * box.width;
  const std::array<Vec2, 4> local = {{{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}};
  std::array<Vec2, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = {box.center_x + c * local[i].x - s * local[i].y,
              box.center_y + s * local[i].x + c * local[i].y};
  }
  return out;
}

/// Shoelace area; positive for counter-clockwise polygons.
inline double polygon_area(const Polygon& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    twice += cross(poly[i], poly[(i + 1) % n]);
  }
  return 0.5 * twice;
}

namespace detail {

inline constexpr double kVertexTolerance = 1e-9;
inline constexpr double kSliverArea = 1e-12;

// Point where segment a-b crosses the infinite line through p0-p1.
inline Vec2 line_intersection(Vec2 a, Vec2 b, Vec2 p0, Vec2 p1) {
  const Vec2 edge = p1 - p0;
  const double da = cross(edge, a - p0);
  const double db = cross(edge, b - p0);
  const double t = da / (da - db);
  return a + t * (b - a);
}

}  // namespace detail

/// Sutherland-Hodgman clipping of `subject` against the convex CCW `clipper`.
inline Polygon clip_convex(const Polygon& subject, const Polygon& clipper) {
  Polygon output = subject;
  for (std::size_t e = 0, n = clipper.size(); e < n && !output.empty(); ++e) {
    const Vec2 p0 = clipper[e];
    const Vec2 p1 = clipper[(e + 1) % n];
    const Vec2 edge = p1 - p0;
    const double edge_len = norm(edge);
    auto inside = [&](Vec2 q) {
      return cross(edge, q - p0) / edge_len >= -detail::kVertexTolerance;
    };
    Polygon input;
    input.swap(output);
    for (std::size_t i = 0, m = input.size(); i < m; ++i) {
      const Vec2 cur = input[i];
      const Vec2 prev = input[(i + m - 1) % m];
      const bool cur_in = inside(cur);
      const bool prev_in = inside(prev);
      if (cur_in) {
        if (!prev_in) output.push_back(detail::line_intersection(prev, cur, p0, p1));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(detail::line_intersection(prev, cur, p0, p1));
      }
    }
  }
  return output;
}

inline double area(const OrientedBox& box) { return box.length * box.width; }

inline double intersection_area(const OrientedBox& a, const OrientedBox& b) {
  if (a == b) return area(a);
  // Cheap reject on circumscribed circles.
  const double ra = 0.5 * std::hypot(a.length, a.width);
  const double rb = 0.5 * std::hypot(b.length, b.width);
  if (norm(a.center() - b.center()) > ra + rb) return 0.0;

  const auto ca = corners(a);
  const auto cb = corners(b);
  const Polygon clipped = clip_convex(Polygon(ca.begin(), ca.end()),
                                      Polygon(cb.begin(), cb.end()));
  const double inter = polygon_area(clipped);
  if (inter < detail::kSliverArea) return 0.0;
  return std::min({inter, area(a), area(b)});
}

/// |D n G| / |D u G|.
inline double iou(const OrientedBox& d, const OrientedBox& g) {
  const double inter = intersection_area(d, g);
  if (inter <= 0.0) return 0.0;
  const double uni = area(d) + area(g) - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

/// Fraction of the ground-truth box `g` covered by detection `d`.
///
/// When `d` fully contains `g` the result switches to |D| / |G|, so an
/// oversized detection reports a cover above one.
inline double cover(const OrientedBox& d, const OrientedBox& g) {
  const double ag = area(g);
  const double inter = intersection_area(d, g);
  if (inter >= ag * (1.0 - 1e-9)) return area(d) / ag;
  return inter / ag;
}

inline double center_distance(const OrientedBox& a, const OrientedBox& b) {
  return norm(a.center() - b.center());
}

/// Euclidean distance divided by the range maximum, clamped to [0, 1].
inline double normalized_distance(Vec2 ego, Vec2 obj, const EvaluationRange& range) {
  return std::clamp(norm(obj - ego) / range.max_distance, 0.0, 1.0);
}

}  // namespace safemetric

#endif  // SAFEMETRIC_GEOMETRY_HPP_
