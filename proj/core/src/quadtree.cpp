#include "cq/quadtree.hpp"

#include <algorithm>
#include <chrono>
#include <string>

namespace cq {

std::array<Rect, 4> quadrant_children(const Rect& r) {
  const Vec2 c = r.center();
  return {{
      {r.x0, c.y, c.x, r.y1},  // NW
      {c.x, c.y, r.x1, r.y1},  // NE
      {r.x0, r.y0, c.x, c.y},  // SW
      {c.x, r.y0, r.x1, c.y},  // SE
  }};
}

int child_index(const Rect& r, Vec2 p) {
  const Vec2 c = r.center();
  const bool east = p.x >= c.x;
  const bool north = p.y >= c.y;
  if (north) return east ? 1 : 0;
  return east ? 3 : 2;
}

std::vector<std::uint32_t> collect_points(const QuadNode& n) {
  std::vector<std::uint32_t> out;
  const auto walk = [&](const QuadNode& node, const auto& self) -> void {
    if (node.is_leaf()) {
      out.insert(out.end(), node.points.begin(), node.points.end());
      return;
    }
    for (const QuadNode& c : *node.children) self(c, self);
  };
  walk(n, walk);
  return out;
}

int Quadtree::compute_entry_level(double root_diameter, double eps, int max_depth) {
  int level = 0;
  double diameter = root_diameter;
  while (diameter > eps && level < max_depth) {
    diameter *= 0.5;
    ++level;
  }
  return level;
}

namespace {

void init_node(QuadNode& n, const Rect& quadrant, int level) {
  n.quadrant = quadrant;
  n.centroid = quadrant.center();
  n.diameter = quadrant.diameter();
  n.level = level;
}

void subdivide(QuadNode& n, const Catalog& catalog, int entry_level) {
  if (n.level >= entry_level || n.points.size() < 3) return;
  const auto quads = quadrant_children(n.quadrant);
  n.children = std::make_unique<std::array<QuadNode, 4>>();
  for (int c = 0; c < 4; ++c) init_node((*n.children)[c], quads[c], n.level + 1);
  for (std::uint32_t idx : n.points) {
    const int c = child_index(n.quadrant, catalog[idx].pos);
    (*n.children)[c].points.push_back(idx);
  }
  n.points.clear();
  n.points.shrink_to_fit();
  for (QuadNode& c : *n.children) subdivide(c, catalog, entry_level);
}

}  // namespace

Quadtree Quadtree::build(const Catalog& catalog, double eps, int max_depth) {
  if (catalog.empty()) {
    throw_error(Error::Kind::contract, "Quadtree::build: empty catalog");
  }
  if (!(eps > 0.0)) {
    throw_error(Error::Kind::contract, "Quadtree::build: eps must be positive");
  }
  const auto t0 = std::chrono::steady_clock::now();

  Quadtree t;
  t.catalog_ = &catalog;
  t.root_ = std::make_unique<QuadNode>();
  init_node(*t.root_, catalog.bounds(), 0);
  const double root_diameter = t.root_->diameter;
  t.entry_level_ = root_diameter > 0.0 ? compute_entry_level(root_diameter, eps, max_depth) : 0;
  t.depth_capped_ = t.entry_level_ == max_depth && root_diameter / std::pow(2.0, max_depth) > eps;

  t.root_->points.resize(catalog.size());
  for (std::uint32_t i = 0; i < catalog.size(); ++i) t.root_->points[i] = i;
  subdivide(*t.root_, catalog, t.entry_level_);

  t.build_ms_ = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

int Quadtree::height() const {
  int h = 0;
  const auto walk = [&](const QuadNode& n, const auto& self) -> void {
    h = std::max(h, n.level);
    if (!n.is_leaf()) {
      for (const QuadNode& c : *n.children) self(c, self);
    }
  };
  walk(*root_, walk);
  return h;
}

std::vector<const QuadNode*> Quadtree::nodes_at_level(int level) const {
  if (level < 0 || level > height()) {
    throw_error(Error::Kind::contract,
                "nodes_at_level: level " + std::to_string(level) + " out of range");
  }
  std::vector<const QuadNode*> out;
  const auto walk = [&](const QuadNode& n, const auto& self) -> void {
    if (n.level == level || (n.is_leaf() && n.level < level)) {
      out.push_back(&n);
      return;
    }
    if (!n.is_leaf()) {
      for (const QuadNode& c : *n.children) self(c, self);
    }
  };
  walk(*root_, walk);
  return out;
}

std::vector<const QuadNode*> Quadtree::leaves_near(Vec2 p, double radius) const {
  std::vector<const QuadNode*> out;
  const int entry = entry_level_;
  const auto walk = [&](const QuadNode& n, const auto& self) -> void {
    if (n.quadrant.min_distance(p) > radius) return;
    if (n.level == entry || n.is_leaf()) {
      out.push_back(&n);
      return;
    }
    for (const QuadNode& c : *n.children) self(c, self);
  };
  walk(*root_, walk);
  return out;
}

std::vector<const QuadNode*> Quadtree::neighbors(const QuadNode& n, double radius) const {
  return leaves_near(n.centroid, radius);
}

std::array<QuadNode, 4>& Quadtree::split_node(QuadNode& n) const {
  if (!n.is_leaf()) return *n.children;
  const auto quads = quadrant_children(n.quadrant);
  auto children = std::make_unique<std::array<QuadNode, 4>>();
  for (int c = 0; c < 4; ++c) init_node((*children)[c], quads[c], n.level + 1);
  for (std::uint32_t idx : n.points) {
    const int c = child_index(n.quadrant, (*catalog_)[idx].pos);
    (*children)[c].points.push_back(idx);
  }
  n.points.clear();
  n.points.shrink_to_fit();
  n.children = std::move(children);
  return *n.children;
}

TreeStats Quadtree::stats() const {
  TreeStats s;
  s.entry_level = entry_level_;
  s.depth_capped = depth_capped_;
  s.build_ms = build_ms_;
  const auto walk = [&](const QuadNode& n, const auto& self) -> void {
    ++s.node_count;
    s.height = std::max(s.height, n.level);
    s.bytes_estimate += sizeof(QuadNode) + n.points.capacity() * sizeof(std::uint32_t);
    if (n.is_leaf()) {
      ++s.leaf_count;
      s.max_leaf_points = std::max(s.max_leaf_points, n.points.size());
      return;
    }
    for (const QuadNode& c : *n.children) self(c, self);
  };
  walk(*root_, walk);
  return s;
}

}  // namespace cq
