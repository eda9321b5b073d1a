#include "cq/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace cq {

bool property_match(std::span<const double> attrs, std::span<const double> query_attrs,
                    double theta) {
  if (query_attrs.empty()) return true;
  if (attrs.size() != query_attrs.size()) {
    throw_error(Error::Kind::contract,
                "property_match: attribute vectors differ in length (" +
                    std::to_string(attrs.size()) + " vs " + std::to_string(query_attrs.size()) +
                    ")");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    worst = std::max(worst, std::abs(attrs[i] - query_attrs[i]));
  }
  return worst <= theta;
}

QueryPattern build_pattern(std::vector<Vec2> positions, std::vector<std::vector<double>> attrs,
                           double epsilon, double theta, std::optional<int> anchor_override) {
  const std::size_t k = positions.size();
  if (k < 2) {
    throw_error(Error::Kind::contract, "build_pattern: need at least 2 elements, got " +
                                           std::to_string(k));
  }
  if (!attrs.empty() && attrs.size() != k) {
    throw_error(Error::Kind::contract, "build_pattern: attrs list length does not match positions");
  }
  const std::size_t attr_len = attrs.empty() ? 0 : attrs.front().size();
  for (const auto& a : attrs) {
    if (a.size() != attr_len) {
      throw_error(Error::Kind::integrity, "build_pattern: attribute vectors differ in length");
    }
  }
  if (epsilon < 0.0) {
    throw_error(Error::Kind::contract, "build_pattern: epsilon must be nonnegative");
  }

  QueryPattern q;
  q.elements.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    q.elements[i].position = positions[i];
    if (!attrs.empty()) q.elements[i].attrs = std::move(attrs[i]);
  }
  q.epsilon = epsilon;
  q.theta = theta;

  q.dist_matrix.assign(k * k, 0.0);
  q.min_pair_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double d = euclidean_distance(positions[i], positions[j]);
      if (d == 0.0) {
        throw_error(Error::Kind::contract, "build_pattern: elements " + std::to_string(i) +
                                               " and " + std::to_string(j) + " coincide");
      }
      q.dist_matrix[i * k + j] = d;
      q.dist_matrix[j * k + i] = d;
      q.min_pair_distance = std::min(q.min_pair_distance, d);
    }
  }

  if (anchor_override) {
    if (*anchor_override < 0 || *anchor_override >= static_cast<int>(k)) {
      throw_error(Error::Kind::contract, "build_pattern: anchor index out of range");
    }
    q.anchor_index = *anchor_override;
  } else {
    int best = 0;
    double best_radius = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      double row_max = 0.0;
      for (std::size_t j = 0; j < k; ++j) row_max = std::max(row_max, q.dist_matrix[i * k + j]);
      if (row_max < best_radius) {
        best_radius = row_max;
        best = static_cast<int>(i);
      }
    }
    q.anchor_index = best;
  }

  double anchor_max = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    anchor_max = std::max(anchor_max, q.dist_matrix[static_cast<std::size_t>(q.anchor_index) * k + j]);
  }
  q.max_anchor_distance = anchor_max;
  return q;
}

}  // namespace cq
