#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "cq/quadtree.hpp"

namespace cq {

/// Candidate lists for one anchor star: buckets[i] holds catalog indices that
/// may play query element i. The anchor's own slot stays empty. Every bucket
/// member already distance-matches its anchor pair within eps_eff and
/// property-matches its query element.
struct BucketSet {
  std::uint32_t anchor = 0;  // catalog index of the star playing the anchor element
  int anchor_element = 0;
  std::vector<std::vector<std::uint32_t>> buckets;  // size k

  bool productive() const {
    for (std::size_t i = 0; i < buckets.size(); ++i) {
      if (static_cast<int>(i) == anchor_element) continue;
      if (buckets[i].empty()) return false;
    }
    return !buckets.empty();
  }

  std::size_t candidate_count() const {
    std::size_t n = 0;
    for (const auto& b : buckets) n += b.size();
    return n;
  }
};

struct FilterCounters {
  std::uint64_t star_comparisons = 0;  // star-pair distance evaluations
  std::uint64_t node_pairs_pruned = 0;
  std::uint64_t descents = 0;
  std::uint64_t pairs_examined = 0;  // general mode: in-band (s1,s2) pairs
};

/// Centroid distance compatible with `target` once both node diameters and the
/// error bound are granted as slack. Sound for pruning: a failing pair cannot
/// contain any matching star pair.
inline bool node_pair_compatible(Vec2 c1, double diam1, Vec2 c2, double diam2, double target,
                                 double eps_eff) {
  const double slack = eps_eff + 0.5 * (diam1 + diam2);
  return std::abs(euclidean_distance(c1, c2) - target) <= slack;
}

inline bool node_pair_compatible(const QuadNode& n1, const QuadNode& n2, double target,
                                 double eps_eff) {
  return node_pair_compatible(n1.centroid, n1.diameter, n2.centroid, n2.diameter, target, eps_eff);
}

/// Entry-level nodes that can hold candidates for any anchor star inside
/// `node`, intersected with `level_nodes`. The search radius is
/// max_anchor_distance + eps_eff + node.diameter/2: the extra half-diameter
/// covers anchor stars sitting away from the node centroid.
std::vector<const QuadNode*> filter_neighbors(const QueryPattern& q, const Quadtree& t,
                                              const QuadNode& node,
                                              std::span<const QuadNode* const> level_nodes,
                                              double eps_eff);

/// All (anchor candidate, element candidate) star pairs from n1 x n2 whose
/// distance matches `target` within eps_eff and whose element candidate
/// property-matches query element `element`. Descends one level whenever doing
/// so would prune at least one populated child pair; otherwise scans the star
/// pairs directly. `use_descend = false` disables the cost model and scans at
/// the top.
std::vector<std::pair<std::uint32_t, std::uint32_t>> tree_descend(
    const Catalog& catalog, const QuadNode& n1, const QuadNode& n2, double target, int element,
    double eps_eff, const QueryPattern& q, FilterCounters* counters = nullptr,
    bool use_descend = true);

/// Per-anchor-star bucket accumulation for one (anchor node, neighbor node)
/// pair: runs the node pair test and tree_descend for every non-anchor element
/// and appends candidates to each anchor star's bucket. `anchor_stars` must be
/// the node's stars that pass the anchor property screen, in node order.
void find_matching_stars(std::map<std::uint32_t, BucketSet>& acc, const Catalog& catalog,
                         const QueryPattern& q, const QuadNode& anchor_node,
                         std::span<const std::uint32_t> anchor_stars, const QuadNode& neighbor_node,
                         double eps_eff, FilterCounters* counters = nullptr,
                         bool use_descend = true);

/// Stars of `node` passing the property screen against the anchor element.
std::vector<std::uint32_t> anchor_candidates(const Catalog& catalog, const QueryPattern& q,
                                             const QuadNode& node);

}  // namespace cq
