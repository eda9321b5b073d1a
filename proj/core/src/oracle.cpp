#include "cq/oracle.hpp"

#include <algorithm>
#include <string>

namespace cq {

namespace {

void check_cap(const Catalog& catalog, std::size_t cap) {
  if (catalog.size() > cap) {
    throw_error(Error::Kind::refused, "oracle: catalog size " + std::to_string(catalog.size()) +
                                          " exceeds cap " + std::to_string(cap) +
                                          " (the oracle is exhaustive by design)");
  }
}

struct PureSearch {
  const Catalog& catalog;
  const QueryPattern& q;
  double eps;
  double theta;
  std::vector<std::uint32_t> chosen;
  std::vector<bool> used;
  OracleResult result;

  void extend(std::size_t elem) {
    ++result.subsets_examined;
    const std::size_t k = static_cast<std::size_t>(q.size());
    if (elem == k) {
      Solution s;
      s.ids.reserve(k);
      for (std::uint32_t idx : chosen) s.ids.push_back(catalog[idx].id);
      result.solutions.push_back(std::move(s));
      return;
    }
    for (std::uint32_t idx = 0; idx < catalog.size(); ++idx) {
      if (used[idx]) continue;
      if (!property_match(catalog[idx].attrs, q.elements[elem].attrs, theta)) continue;
      bool ok = true;
      for (std::size_t prev = 0; prev < elem && ok; ++prev) {
        const double d = euclidean_distance(catalog[chosen[prev]].pos, catalog[idx].pos);
        ok = distance_match(d, q.dist(static_cast<int>(prev), static_cast<int>(elem)), eps);
      }
      if (!ok) continue;
      chosen[elem] = idx;
      used[idx] = true;
      extend(elem + 1);
      used[idx] = false;
    }
  }
};

struct GeneralSearch {
  const Catalog& catalog;
  const QueryPattern& q_norm;  // normalized pattern
  GeneralTolerance tol;
  double lo;  // internal scale units
  double hi;
  std::vector<std::uint32_t> chosen;
  std::vector<bool> used;
  OracleResult result;

  void extend(std::size_t elem, double cur_lo, double cur_hi) {
    ++result.subsets_examined;
    const std::size_t k = static_cast<std::size_t>(q_norm.size());
    if (elem == k) {
      Solution s;
      s.ids.reserve(k);
      for (std::uint32_t idx : chosen) s.ids.push_back(catalog[idx].id);
      s.scale_min = cur_lo;
      s.scale_max = cur_hi;
      result.solutions.push_back(std::move(s));
      return;
    }
    for (std::uint32_t idx = 0; idx < catalog.size(); ++idx) {
      if (used[idx]) continue;
      if (!property_match(catalog[idx].attrs, q_norm.elements[elem].attrs, q_norm.theta)) continue;
      double next_lo = cur_lo;
      double next_hi = cur_hi;
      bool ok = true;
      for (std::size_t prev = 0; prev < elem && ok; ++prev) {
        const double d = euclidean_distance(catalog[chosen[prev]].pos, catalog[idx].pos);
        const auto [wl, wh] =
            scale_window(d, q_norm.dist(static_cast<int>(prev), static_cast<int>(elem)), tol);
        next_lo = std::max(next_lo, wl);
        next_hi = std::min(next_hi, wh);
        ok = next_lo <= next_hi;
      }
      if (!ok) continue;
      chosen[elem] = idx;
      used[idx] = true;
      extend(elem + 1, next_lo, next_hi);
      used[idx] = false;
    }
  }
};

}  // namespace

OracleResult brute_pure(const Catalog& catalog, const QueryPattern& q, double eps, double theta,
                        std::size_t cap) {
  check_cap(catalog, cap);
  PureSearch search{catalog, q, eps, theta, {}, {}, {}};
  search.chosen.resize(static_cast<std::size_t>(q.size()));
  search.used.resize(catalog.size(), false);
  search.extend(0);
  std::sort(search.result.solutions.begin(), search.result.solutions.end());
  return std::move(search.result);
}

OracleResult brute_general(const Catalog& catalog, const QueryPattern& q,
                           const GeneralTolerance& tol, double scale_lo, double scale_hi,
                           std::size_t cap) {
  check_cap(catalog, cap);
  const NormalizedPattern norm = normalize_pattern(q);
  GeneralSearch search{catalog,
                       norm.pattern,
                       tol,
                       scale_lo * norm.max_distance,
                       scale_hi * norm.max_distance,
                       {},
                       {},
                       {}};
  search.chosen.resize(static_cast<std::size_t>(q.size()));
  search.used.resize(catalog.size(), false);
  search.extend(0, search.lo, search.hi);
  // Report scales in query units.
  for (Solution& s : search.result.solutions) {
    s.scale_min /= norm.max_distance;
    s.scale_max /= norm.max_distance;
  }
  std::sort(search.result.solutions.begin(), search.result.solutions.end());
  return std::move(search.result);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> brute_pairs(
    const Catalog& catalog, std::span<const std::uint32_t> stars1,
    std::span<const std::uint32_t> stars2, double target, double eps) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t a : stars1) {
    for (std::uint32_t b : stars2) {
      if (a == b) continue;
      if (distance_match(euclidean_distance(catalog[a].pos, catalog[b].pos), target, eps)) {
        out.emplace_back(a, b);
      }
    }
  }
  return out;
}

}  // namespace cq
