#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cq/composition.hpp"
#include "cq/quadtree.hpp"

namespace cq {

/// Window of scale factors under which a candidate satisfies every pairwise
/// constraint: any f in [max_min, min_max] works when the window is non-empty.
struct ScaleInterval {
  double max_min = 0.0;
  double min_max = 0.0;
  bool satisfiable() const { return max_min <= min_max; }
};

enum class EpsilonMode { constant, proportional };

/// Distance tolerance for scale-free search: a fixed additive epsilon, or a
/// relative factor e (< 1) that grows the tolerance with the scale.
struct GeneralTolerance {
  EpsilonMode mode = EpsilonMode::constant;
  double value = 0.0;  // epsilon (constant) or e (proportional)
};

/// Pattern rescaled so its largest pairwise distance is exactly 1, plus the
/// pair that realizes it (ties break to the lowest index pair) and the
/// original max distance for converting scales back to query units.
struct NormalizedPattern {
  QueryPattern pattern;
  int far_a = 0;
  int far_b = 1;
  double max_distance = 1.0;
};

NormalizedPattern normalize_pattern(const QueryPattern& q);

/// The search budget used through the bucket/join stages: twice the constant
/// epsilon, or twice e*scalebasic/(1-e) in proportional mode. Guarantees no
/// false negatives before post-processing trims them back to epsilon.
double effective_search_epsilon(double scalebasic, const GeneralTolerance& tol);

/// Scale factors at which `star_dist` hits the tolerance envelope of a
/// normalized pattern distance pij: constant mode gives ((d-eps)/pij,
/// (d+eps)/pij); proportional solves scale*(1+-e)*pij = d.
std::pair<double, double> scale_window(double star_dist, double pij, const GeneralTolerance& tol);

/// MaxMin/MinMax over scale_window of every element pair. `dists` is the k*k
/// row-major star distance matrix for the candidate sequence.
ScaleInterval post_process_distances(std::span<const double> dists, const QueryPattern& q_norm,
                                     const GeneralTolerance& tol);

/// Same, computing the distances from catalog members (ordered by element).
ScaleInterval post_process(const Catalog& catalog, std::span<const std::uint32_t> members,
                           const QueryPattern& q_norm, const GeneralTolerance& tol);

struct GeneralConfig {
  GeneralTolerance tol;
  double scale_lo = 0.5;   // in units of the query pattern as given
  double scale_hi = 2.0;
  bool symmetric_pair_skip = false;  // only sensible for attribute-free symmetric patterns
};

/// One posited (s1, s2) assignment to the farthest pattern pair, with the
/// candidate buckets built at the 2-epsilon search tolerance. B[far_a] = {s1},
/// B[far_b] = {s2}.
struct GeneralCandidate {
  std::uint32_t s1 = 0;
  std::uint32_t s2 = 0;
  double scalebasic = 0.0;  // dist(s1, s2), in normalized-pattern units
  BucketSet buckets;
};

/// All candidate pairs anchored at star s1: ordered pairs whose distance lies
/// in the scale band (widened by the tolerance so boundary matches survive),
/// each with its buckets. Property screens are applied to s1, s2 and every
/// bucket member.
std::vector<GeneralCandidate> general_candidates_for_star(const Catalog& catalog,
                                                          const Quadtree& tree,
                                                          const NormalizedPattern& norm,
                                                          const GeneralConfig& cfg,
                                                          std::uint32_t s1,
                                                          FilterCounters* counters = nullptr);

/// Star-pair distance band implied by the scale range plus tolerance slack.
std::pair<double, double> candidate_pair_band(const NormalizedPattern& norm,
                                              const GeneralConfig& cfg);

}  // namespace cq
