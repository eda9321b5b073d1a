#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cq/composition.hpp"
#include "cq/general.hpp"

namespace cq {

/// Exhaustive reference answers. Deliberately slow and simple: these back the
/// equivalence tests and the `oracle` CLI subcommand, so they must never share
/// the quadtree/filtering/join machinery they exist to check.
struct OracleResult {
  std::vector<Solution> solutions;  // canonical sorted id sequences, no duplicates
  std::uint64_t subsets_examined = 0;  // partial assignments visited
};

constexpr std::size_t kOracleDefaultCap = 200;

/// Every ordered assignment of distinct catalog points to the query elements
/// that passes property_match on each element and distance_match on every
/// pair. Prefix assignments that already violate a pair are not extended.
OracleResult brute_pure(const Catalog& catalog, const QueryPattern& q, double eps, double theta,
                        std::size_t cap = kOracleDefaultCap);

/// Every ordered assignment whose analytic scale window (MaxMin/MinMax over
/// all pairs) intersects [scale_lo, scale_hi] (in units of the query as
/// given). No scale discretization: this is the exact test.
OracleResult brute_general(const Catalog& catalog, const QueryPattern& q,
                           const GeneralTolerance& tol, double scale_lo, double scale_hi,
                           std::size_t cap = kOracleDefaultCap);

/// Full double loop over two star lists with distance_match; identical-index
/// self pairs are skipped.
std::vector<std::pair<std::uint32_t, std::uint32_t>> brute_pairs(
    const Catalog& catalog, std::span<const std::uint32_t> stars1,
    std::span<const std::uint32_t> stars2, double target, double eps);

}  // namespace cq
