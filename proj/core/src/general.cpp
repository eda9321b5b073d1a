#include "cq/general.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cq {

NormalizedPattern normalize_pattern(const QueryPattern& q) {
  const std::size_t k = static_cast<std::size_t>(q.size());
  NormalizedPattern norm;
  double max_d = 0.0;
  int a = 0, b = 1;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double d = q.dist_matrix[i * k + j];
      if (d > max_d) {
        max_d = d;
        a = static_cast<int>(i);
        b = static_cast<int>(j);
      }
    }
  }
  norm.far_a = a;
  norm.far_b = b;
  norm.max_distance = max_d;

  norm.pattern = q;
  const double inv = 1.0 / max_d;
  for (double& d : norm.pattern.dist_matrix) d *= inv;
  // Keep the stored geometry consistent with the rescaled matrix.
  for (auto& e : norm.pattern.elements) {
    e.position.x *= inv;
    e.position.y *= inv;
  }
  norm.pattern.dist_matrix[static_cast<std::size_t>(a) * k + static_cast<std::size_t>(b)] = 1.0;
  norm.pattern.dist_matrix[static_cast<std::size_t>(b) * k + static_cast<std::size_t>(a)] = 1.0;
  norm.pattern.min_pair_distance = q.min_pair_distance * inv;
  norm.pattern.max_anchor_distance = q.max_anchor_distance * inv;
  return norm;
}

double effective_search_epsilon(double scalebasic, const GeneralTolerance& tol) {
  if (tol.mode == EpsilonMode::constant) return 2.0 * tol.value;
  return 2.0 * (tol.value * scalebasic / (1.0 - tol.value));
}

std::pair<double, double> scale_window(double star_dist, double pij, const GeneralTolerance& tol) {
  if (!(pij > 0.0)) {
    throw_error(Error::Kind::contract, "scale_window: pattern distance must be positive");
  }
  if (tol.mode == EpsilonMode::constant) {
    return {(star_dist - tol.value) / pij, (star_dist + tol.value) / pij};
  }
  return {star_dist / ((1.0 + tol.value) * pij), star_dist / ((1.0 - tol.value) * pij)};
}

ScaleInterval post_process_distances(std::span<const double> dists, const QueryPattern& q_norm,
                                     const GeneralTolerance& tol) {
  const std::size_t k = static_cast<std::size_t>(q_norm.size());
  ScaleInterval out;
  out.max_min = -std::numeric_limits<double>::infinity();
  out.min_max = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto [lo, hi] =
          scale_window(dists[i * k + j], q_norm.dist_matrix[i * k + j], tol);
      out.max_min = std::max(out.max_min, lo);
      out.min_max = std::min(out.min_max, hi);
    }
  }
  return out;
}

ScaleInterval post_process(const Catalog& catalog, std::span<const std::uint32_t> members,
                           const QueryPattern& q_norm, const GeneralTolerance& tol) {
  const std::size_t k = members.size();
  std::vector<double> dists(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double d = euclidean_distance(catalog[members[i]].pos, catalog[members[j]].pos);
      dists[i * k + j] = d;
      dists[j * k + i] = d;
    }
  }
  return post_process_distances(dists, q_norm, tol);
}

std::pair<double, double> candidate_pair_band(const NormalizedPattern& norm,
                                              const GeneralConfig& cfg) {
  // Scales are user-facing (relative to the query as given); internally they
  // multiply the normalized pattern, so the band is scaled by max_distance.
  const double lo = cfg.scale_lo * norm.max_distance;
  const double hi = cfg.scale_hi * norm.max_distance;
  if (cfg.tol.mode == EpsilonMode::constant) {
    return {std::max(0.0, lo - cfg.tol.value), hi + cfg.tol.value};
  }
  return {lo * (1.0 - cfg.tol.value), hi * (1.0 + cfg.tol.value)};
}

std::vector<GeneralCandidate> general_candidates_for_star(const Catalog& catalog,
                                                          const Quadtree& tree,
                                                          const NormalizedPattern& norm,
                                                          const GeneralConfig& cfg,
                                                          std::uint32_t s1,
                                                          FilterCounters* counters) {
  const QueryPattern& q = norm.pattern;
  const std::size_t k = static_cast<std::size_t>(q.size());
  const int a = norm.far_a;
  const int b = norm.far_b;
  const Point& p1 = catalog[s1];

  std::vector<GeneralCandidate> out;
  if (!property_match(p1.attrs, q.elements[static_cast<std::size_t>(a)].attrs, q.theta)) {
    return out;
  }

  const auto [band_lo, band_hi] = candidate_pair_band(norm, cfg);
  if (!(band_hi > 0.0)) return out;

  // Everything a bucket may ever hold lies within scalebasic + budget of s1;
  // collect once at the widest radius and filter per pair.
  const double max_budget = effective_search_epsilon(band_hi, cfg.tol);
  std::vector<std::uint32_t> nearby;
  for (const QuadNode* node : tree.leaves_near(p1.pos, band_hi + max_budget)) {
    nearby.insert(nearby.end(), node->points.begin(), node->points.end());
  }

  for (std::uint32_t s2 : nearby) {
    if (s2 == s1) continue;
    if (cfg.symmetric_pair_skip && catalog[s2].id < p1.id) continue;
    const Point& p2 = catalog[s2];
    if (counters) ++counters->star_comparisons;
    const double scalebasic = euclidean_distance(p1.pos, p2.pos);
    if (scalebasic < band_lo || scalebasic > band_hi) continue;
    if (counters) ++counters->pairs_examined;
    if (!property_match(p2.attrs, q.elements[static_cast<std::size_t>(b)].attrs, q.theta)) continue;

    const double budget = effective_search_epsilon(scalebasic, cfg.tol);

    GeneralCandidate cand;
    cand.s1 = s1;
    cand.s2 = s2;
    cand.scalebasic = scalebasic;
    cand.buckets.anchor = s1;
    cand.buckets.anchor_element = a;
    cand.buckets.buckets.resize(k);
    cand.buckets.buckets[static_cast<std::size_t>(b)] = {s2};

    bool all_filled = true;
    for (std::size_t i = 0; i < k && all_filled; ++i) {
      if (static_cast<int>(i) == a || static_cast<int>(i) == b) continue;
      auto& bucket = cand.buckets.buckets[i];
      const double target1 = scalebasic * q.dist(a, static_cast<int>(i));
      const double target2 = scalebasic * q.dist(b, static_cast<int>(i));
      for (std::uint32_t s : nearby) {
        if (s == s1 || s == s2) continue;
        const Point& ps = catalog[s];
        if (ps.id == p1.id || ps.id == p2.id) continue;
        if (counters) counters->star_comparisons += 2;
        if (!distance_match(euclidean_distance(p1.pos, ps.pos), target1, budget)) continue;
        if (!distance_match(euclidean_distance(p2.pos, ps.pos), target2, budget)) continue;
        if (!property_match(ps.attrs, q.elements[i].attrs, q.theta)) continue;
        bucket.push_back(s);
      }
      all_filled = !bucket.empty();
    }
    if (!all_filled) continue;
    out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace cq
