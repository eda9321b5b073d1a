#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cq/geometry.hpp"

namespace cq {

struct Point {
  std::uint64_t id = 0;
  Vec2 pos;
  std::vector<double> attrs;
};

/// Immutable after construction; safe for shared concurrent reads.
class Catalog {
 public:
  Catalog() = default;
  Catalog(std::vector<Point> points, std::vector<std::string> attr_names);

  const std::vector<Point>& points() const { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  const std::vector<std::string>& attr_names() const { return attr_names_; }
  std::size_t attr_count() const { return attr_names_.size(); }

  /// Tightest axis-aligned box over all points; contract error when empty.
  const Rect& bounds() const;

 private:
  std::vector<Point> points_;
  std::vector<std::string> attr_names_;
  Rect bounds_{};
  bool has_bounds_ = false;
};

/// Reads a CSV catalog. The header must provide id/x/y columns (SDSS-style
/// aliases objID/ra/dec are accepted, case-insensitive) plus every requested
/// attribute column. '#'-prefixed lines are skipped.
Catalog load_csv(const std::string& path, const std::vector<std::string>& attr_columns = {});

/// Writes `id,x,y[,attr...]` with full double round-trip precision.
void write_csv(const Catalog& catalog, const std::string& path);

/// n points uniform in region, attributes uniform in their ranges.
/// Deterministic for a fixed seed.
Catalog generate_uniform(std::size_t n, Rect region,
                         const std::vector<std::pair<double, double>>& attr_ranges,
                         std::uint64_t seed);

/// Plants `planted` copies of base_pattern, each scaled by a factor drawn
/// uniformly from [scale_lo, scale_hi] and translated to a uniform-random spot
/// inside region, then fills with uniform noise up to n points. Planted points
/// come first (ids 1..planted*k, instance by instance, element order), so tests
/// can locate them. Deterministic for a fixed seed.
Catalog generate_dense(std::size_t n, const QueryPattern& base_pattern, double scale_lo,
                       double scale_hi, std::size_t planted, std::uint64_t seed, Rect region);

}  // namespace cq
