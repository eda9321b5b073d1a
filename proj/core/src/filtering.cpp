#include "cq/filtering.hpp"

#include <algorithm>
#include <unordered_set>

namespace cq {

namespace {

// Transient node state for the descent below the built tree. The shared tree
// is never mutated; each call owns its views.
struct DescendView {
  Rect rect;
  Vec2 centroid;
  double diameter = 0.0;
  std::vector<std::uint32_t> pts;
};

DescendView view_of(const Catalog&, const QuadNode& n) {
  DescendView v;
  v.rect = n.quadrant;
  v.centroid = n.centroid;
  v.diameter = n.diameter;
  v.pts = n.is_leaf() ? n.points : collect_points(n);
  return v;
}

std::array<DescendView, 4> split_view(const Catalog& catalog, const DescendView& v) {
  const auto quads = quadrant_children(v.rect);
  std::array<DescendView, 4> out;
  for (int c = 0; c < 4; ++c) {
    out[c].rect = quads[c];
    out[c].centroid = quads[c].center();
    out[c].diameter = quads[c].diameter();
  }
  for (std::uint32_t idx : v.pts) {
    out[child_index(v.rect, catalog[idx].pos)].pts.push_back(idx);
  }
  return out;
}

// Below this many candidate pairs a direct scan is cheaper than another
// split; it also bounds the recursion on coincident points.
constexpr std::size_t kScanPairThreshold = 16;
constexpr int kMaxDescentDepth = 64;

void scan_pairs(const Catalog& catalog, const DescendView& v1, const DescendView& v2,
                double target, const PatternElement& elem, double theta, double eps_eff,
                std::vector<std::pair<std::uint32_t, std::uint32_t>>& out,
                FilterCounters* counters) {
  for (std::uint32_t a : v1.pts) {
    const Vec2 pa = catalog[a].pos;
    for (std::uint32_t b : v2.pts) {
      if (a == b) continue;
      if (counters) ++counters->star_comparisons;
      if (!distance_match(euclidean_distance(pa, catalog[b].pos), target, eps_eff)) continue;
      if (!property_match(catalog[b].attrs, elem.attrs, theta)) continue;
      out.emplace_back(a, b);
    }
  }
}

void descend(const Catalog& catalog, const DescendView& v1, const DescendView& v2, double target,
             const PatternElement& elem, double theta, double eps_eff, int depth,
             std::vector<std::pair<std::uint32_t, std::uint32_t>>& out, FilterCounters* counters,
             bool use_descend) {
  if (v1.pts.empty() || v2.pts.empty()) return;
  if (!use_descend || v1.pts.size() * v2.pts.size() <= kScanPairThreshold ||
      depth >= kMaxDescentDepth) {
    scan_pairs(catalog, v1, v2, target, elem, theta, eps_eff, out, counters);
    return;
  }

  const auto c1 = split_view(catalog, v1);
  const auto c2 = split_view(catalog, v2);

  // findNonPairs: collect populated child pairs that the distance test rules
  // out. Going down is worthwhile only if the split eliminates something.
  bool any_pruned = false;
  bool survivors[4][4] = {};
  for (int i = 0; i < 4; ++i) {
    if (c1[i].pts.empty()) continue;
    for (int j = 0; j < 4; ++j) {
      if (c2[j].pts.empty()) continue;
      if (node_pair_compatible(c1[i].centroid, c1[i].diameter, c2[j].centroid, c2[j].diameter,
                               target, eps_eff)) {
        survivors[i][j] = true;
      } else {
        any_pruned = true;
        if (counters) ++counters->node_pairs_pruned;
      }
    }
  }

  if (!any_pruned) {
    scan_pairs(catalog, v1, v2, target, elem, theta, eps_eff, out, counters);
    return;
  }

  if (counters) ++counters->descents;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (!survivors[i][j]) continue;
      descend(catalog, c1[i], c2[j], target, elem, theta, eps_eff, depth + 1, out, counters,
              use_descend);
    }
  }
}

}  // namespace

std::vector<const QuadNode*> filter_neighbors(const QueryPattern& q, const Quadtree& t,
                                              const QuadNode& node,
                                              std::span<const QuadNode* const> level_nodes,
                                              double eps_eff) {
  const double radius = q.max_anchor_distance + eps_eff + 0.5 * node.diameter;
  const auto near = t.neighbors(node, radius);
  std::unordered_set<const QuadNode*> allowed(level_nodes.begin(), level_nodes.end());
  std::vector<const QuadNode*> out;
  out.reserve(near.size());
  for (const QuadNode* n : near) {
    if (allowed.count(n)) out.push_back(n);
  }
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> tree_descend(
    const Catalog& catalog, const QuadNode& n1, const QuadNode& n2, double target, int element,
    double eps_eff, const QueryPattern& q, FilterCounters* counters, bool use_descend) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  descend(catalog, view_of(catalog, n1), view_of(catalog, n2), target,
          q.elements[static_cast<std::size_t>(element)], q.theta, eps_eff, 0, out, counters,
          use_descend);
  return out;
}

std::vector<std::uint32_t> anchor_candidates(const Catalog& catalog, const QueryPattern& q,
                                             const QuadNode& node) {
  const auto& anchor_elem = q.elements[static_cast<std::size_t>(q.anchor_index)];
  std::vector<std::uint32_t> out;
  out.reserve(node.points.size());
  for (std::uint32_t idx : node.points) {
    if (property_match(catalog[idx].attrs, anchor_elem.attrs, q.theta)) out.push_back(idx);
  }
  return out;
}

void find_matching_stars(std::map<std::uint32_t, BucketSet>& acc, const Catalog& catalog,
                         const QueryPattern& q, const QuadNode& anchor_node,
                         std::span<const std::uint32_t> anchor_stars, const QuadNode& neighbor_node,
                         double eps_eff, FilterCounters* counters, bool use_descend) {
  if (anchor_stars.empty()) return;
  const int k = q.size();

  DescendView anchor_view;
  anchor_view.rect = anchor_node.quadrant;
  anchor_view.centroid = anchor_node.centroid;
  anchor_view.diameter = anchor_node.diameter;
  anchor_view.pts.assign(anchor_stars.begin(), anchor_stars.end());

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (int i = 0; i < k; ++i) {
    if (i == q.anchor_index) continue;
    const double target = q.dist(q.anchor_index, i);
    if (!node_pair_compatible(anchor_node, neighbor_node, target, eps_eff)) continue;

    pairs.clear();
    descend(catalog, anchor_view, view_of(catalog, neighbor_node), target,
            q.elements[static_cast<std::size_t>(i)], q.theta, eps_eff, 0, pairs, counters,
            use_descend);

    for (const auto& [anchor_idx, cand_idx] : pairs) {
      if (catalog[cand_idx].id == catalog[anchor_idx].id) continue;
      auto [it, inserted] = acc.try_emplace(anchor_idx);
      if (inserted) {
        it->second.anchor = anchor_idx;
        it->second.anchor_element = q.anchor_index;
        it->second.buckets.resize(static_cast<std::size_t>(k));
      }
      it->second.buckets[static_cast<std::size_t>(i)].push_back(cand_idx);
    }
  }
}

}  // namespace cq
