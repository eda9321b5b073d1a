#pragma once

#include <optional>
#include <string>

#include "cq/engine.hpp"
#include "cq/quadtree.hpp"

namespace cq {

/// Pattern document: {"elements":[{"x":..,"y":..,"attrs":[..]},..],
/// "epsilon":.., "theta":.., "anchor": optional index}.
QueryPattern load_pattern_json(const std::string& path,
                               std::optional<double> epsilon_override = std::nullopt,
                               std::optional<double> theta_override = std::nullopt,
                               std::optional<int> anchor_override = std::nullopt);

QueryPattern parse_pattern_json(const std::string& text,
                                std::optional<double> epsilon_override = std::nullopt,
                                std::optional<double> theta_override = std::nullopt,
                                std::optional<int> anchor_override = std::nullopt);

void save_pattern_json(const QueryPattern& q, const std::string& path);

/// One row per solution: id_0..id_{k-1}[,scale_min,scale_max]. The scale
/// columns appear in general mode.
void write_solutions_csv(const std::vector<Solution>& solutions, int k, bool with_scale,
                         const std::string& path);

std::string stats_to_json(const QueryStats& stats);
std::string tree_stats_to_json(const TreeStats& stats);

}  // namespace cq
