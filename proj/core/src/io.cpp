#include "cq/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cq {

using nlohmann::json;

QueryPattern parse_pattern_json(const std::string& text, std::optional<double> epsilon_override,
                                std::optional<double> theta_override,
                                std::optional<int> anchor_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw_error(Error::Kind::parse, std::string("pattern JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("elements") || !doc["elements"].is_array()) {
    throw_error(Error::Kind::schema, "pattern JSON: missing 'elements' array");
  }

  std::vector<Vec2> positions;
  std::vector<std::vector<double>> attrs;
  for (const auto& e : doc["elements"]) {
    if (!e.contains("x") || !e.contains("y")) {
      throw_error(Error::Kind::schema, "pattern JSON: element missing x or y");
    }
    positions.push_back({e["x"].get<double>(), e["y"].get<double>()});
    std::vector<double> a;
    if (e.contains("attrs")) {
      for (const auto& v : e["attrs"]) a.push_back(v.get<double>());
    }
    attrs.push_back(std::move(a));
  }

  const double epsilon =
      epsilon_override.value_or(doc.value("epsilon", 0.0));
  const double theta = theta_override.value_or(doc.value("theta", 0.0));
  std::optional<int> anchor = anchor_override;
  if (!anchor && doc.contains("anchor")) anchor = doc["anchor"].get<int>();

  return build_pattern(std::move(positions), std::move(attrs), epsilon, theta, anchor);
}

QueryPattern load_pattern_json(const std::string& path, std::optional<double> epsilon_override,
                               std::optional<double> theta_override,
                               std::optional<int> anchor_override) {
  std::ifstream in(path);
  if (!in) {
    throw_error(Error::Kind::io, "cannot open pattern file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pattern_json(buf.str(), epsilon_override, theta_override, anchor_override);
}

void save_pattern_json(const QueryPattern& q, const std::string& path) {
  json doc;
  doc["elements"] = json::array();
  for (const auto& e : q.elements) {
    json el;
    el["x"] = e.position.x;
    el["y"] = e.position.y;
    el["attrs"] = e.attrs;
    doc["elements"].push_back(std::move(el));
  }
  doc["epsilon"] = q.epsilon;
  doc["theta"] = q.theta;
  doc["anchor"] = q.anchor_index;
  std::ofstream out(path);
  if (!out) {
    throw_error(Error::Kind::io, "cannot write pattern file: " + path);
  }
  out << doc.dump(2) << '\n';
}

void write_solutions_csv(const std::vector<Solution>& solutions, int k, bool with_scale,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw_error(Error::Kind::io, "cannot write solutions file: " + path);
  }
  for (int i = 0; i < k; ++i) {
    if (i) out << ',';
    out << "id_" << i;
  }
  if (with_scale) out << ",scale_min,scale_max";
  out << '\n';
  char buf[64];
  for (const auto& s : solutions) {
    for (std::size_t i = 0; i < s.ids.size(); ++i) {
      if (i) out << ',';
      out << s.ids[i];
    }
    if (with_scale) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", s.scale_min, s.scale_max);
      out << buf;
    }
    out << '\n';
  }
}

std::string stats_to_json(const QueryStats& stats) {
  json doc;
  doc["anchors_total"] = stats.anchors_total;
  doc["anchors_productive"] = stats.anchors_productive;
  doc["candidate_pairs"] = stats.candidate_pairs;
  doc["productive_bucket_elements"] = stats.productive_bucket_elements;
  doc["solutions"] = stats.solutions;
  doc["comparisons"] = stats.comparisons;
  doc["match_exists"] = stats.match_exists;
  doc["elapsed_ms"] = {{"build", stats.elapsed.build_ms},
                       {"filter", stats.elapsed.filter_ms},
                       {"compose", stats.elapsed.compose_ms},
                       {"total", stats.elapsed.total_ms}};
  return doc.dump(2);
}

std::string tree_stats_to_json(const TreeStats& stats) {
  json doc;
  doc["height"] = stats.height;
  doc["entry_level"] = stats.entry_level;
  doc["node_count"] = stats.node_count;
  doc["leaf_count"] = stats.leaf_count;
  doc["max_leaf_points"] = stats.max_leaf_points;
  doc["build_ms"] = stats.build_ms;
  doc["bytes_estimate"] = stats.bytes_estimate;
  doc["depth_capped"] = stats.depth_capped;
  return doc.dump(2);
}

}  // namespace cq
