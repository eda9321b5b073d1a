#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "cq/catalog.hpp"

namespace cq {

/// One quadrant of the index. Children, when present, tile the quadrant in
/// Z-order (NW, NE, SW, SE). Point payloads (catalog indices) live in leaves
/// only; the centroid is the quadrant's geometric center regardless of where
/// the points sit.
struct QuadNode {
  Rect quadrant;
  Vec2 centroid;
  double diameter = 0.0;  // quadrant diagonal
  int level = 0;
  std::vector<std::uint32_t> points;  // leaf payload: indices into the catalog
  std::unique_ptr<std::array<QuadNode, 4>> children;

  bool is_leaf() const { return children == nullptr; }
};

struct TreeStats {
  int height = 0;
  int entry_level = 0;
  bool depth_capped = false;
  std::size_t node_count = 0;
  std::size_t leaf_count = 0;
  std::size_t max_leaf_points = 0;
  double build_ms = 0.0;
  std::size_t bytes_estimate = 0;
};

/// Spatial index over one catalog. Built once; immutable for queries.
/// split_node materializes children below the built structure and is meant
/// for single-threaded use (query-time descent works on private copies and
/// never touches the shared tree).
class Quadtree {
 public:
  static constexpr int kDefaultMaxDepth = 24;

  /// Smallest level L with root_diameter / 2^L <= eps, capped at max_depth.
  static int compute_entry_level(double root_diameter, double eps,
                                 int max_depth = kDefaultMaxDepth);

  /// Subdivides until a node reaches the entry level or holds fewer than
  /// 3 points. Every catalog point ends up in exactly one leaf.
  static Quadtree build(const Catalog& catalog, double eps, int max_depth = kDefaultMaxDepth);

  const QuadNode& root() const { return *root_; }
  QuadNode& root() { return *root_; }
  int entry_level() const { return entry_level_; }
  bool depth_capped() const { return depth_capped_; }

  /// The catalog the tree indexes; must outlive the tree.
  const Catalog& catalog() const { return *catalog_; }

  /// Max depth present in the tree (recomputed, splits may have deepened it).
  int height() const;

  /// Nodes at exactly `level` plus leaves that stopped shallower (each leaf
  /// represents its whole subtree). Deterministic Z-order.
  std::vector<const QuadNode*> nodes_at_level(int level) const;

  /// The anchor-iteration granularity: nodes_at_level(entry_level()).
  std::vector<const QuadNode*> entry_nodes() const { return nodes_at_level(entry_level_); }

  /// Entry-level nodes whose quadrant's minimum distance to `p` is <= radius.
  std::vector<const QuadNode*> leaves_near(Vec2 p, double radius) const;

  /// Entry-level nodes whose quadrant's minimum distance to n's centroid is
  /// <= radius; always includes n itself.
  std::vector<const QuadNode*> neighbors(const QuadNode& n, double radius) const;

  /// The 4 children of n, materializing them for a leaf by redistributing its
  /// point stack. Idempotent on internal nodes.
  std::array<QuadNode, 4>& split_node(QuadNode& n) const;

  /// Structure counters are recomputed on demand; build_ms/entry level are
  /// from build time.
  TreeStats stats() const;

 private:
  Quadtree() = default;

  std::unique_ptr<QuadNode> root_;
  const Catalog* catalog_ = nullptr;
  int entry_level_ = 0;
  bool depth_capped_ = false;
  double build_ms_ = 0.0;
};

/// Child quadrants in Z-order (NW, NE, SW, SE).
std::array<Rect, 4> quadrant_children(const Rect& r);

/// Z-order child slot for a point: x >= cx selects east, y >= cy selects north.
int child_index(const Rect& r, Vec2 p);

/// All catalog indices stored in the subtree under n.
std::vector<std::uint32_t> collect_points(const QuadNode& n);

}  // namespace cq
