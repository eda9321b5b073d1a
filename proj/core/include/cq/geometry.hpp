#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cq/error.hpp"

namespace cq {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

/// Plain L2 distance; coordinates are treated as planar.
inline double euclidean_distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// |observed - target| <= eps, bounds inclusive on both sides.
inline bool distance_match(double observed, double target, double eps) {
  return std::abs(observed - target) <= eps;
}

/// Attribute similarity: Chebyshev (max-abs) distance between the two attribute
/// vectors at most theta. An empty query vector matches anything.
bool property_match(std::span<const double> attrs, std::span<const double> query_attrs,
                    double theta);

// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  Vec2 center() const { return {(x0 + x1) * 0.5, (y0 + y1) * 0.5}; }
  double diameter() const { return std::hypot(width(), height()); }

  bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }

  /// Distance from p to the closest point of the rectangle (0 when inside).
  double min_distance(Vec2 p) const {
    const double dx = std::max({x0 - p.x, 0.0, p.x - x1});
    const double dy = std::max({y0 - p.y, 0.0, p.y - y1});
    return std::sqrt(dx * dx + dy * dy);
  }
};

struct PatternElement {
  Vec2 position;
  std::vector<double> attrs;  // may be empty
};

/// A constellation query: k elements, their pairwise distance matrix, the
/// additive distance tolerance epsilon and the attribute threshold theta.
struct QueryPattern {
  std::vector<PatternElement> elements;
  int anchor_index = 0;
  std::vector<double> dist_matrix;  // k*k, row-major
  double epsilon = 0.0;
  double theta = 0.0;
  double min_pair_distance = 0.0;   // smallest off-diagonal entry
  double max_anchor_distance = 0.0; // max over the anchor row

  int size() const { return static_cast<int>(elements.size()); }
  double dist(int i, int j) const { return dist_matrix[static_cast<std::size_t>(i) * elements.size() + j]; }
  bool has_attrs() const { return !elements.empty() && !elements.front().attrs.empty(); }

  /// True when epsilon is so large that distinct query elements become
  /// indistinguishable; callers should warn, not fail.
  bool epsilon_exceeds_min_pair() const { return epsilon >= min_pair_distance; }
};

/// Validates the element set, fills the distance matrix and picks the anchor:
/// the element whose farthest companion is nearest (smallest search radius).
/// `anchor_override`, when given, wins.
QueryPattern build_pattern(std::vector<Vec2> positions, std::vector<std::vector<double>> attrs,
                           double epsilon, double theta,
                           std::optional<int> anchor_override = std::nullopt);

}  // namespace cq
