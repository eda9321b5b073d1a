#include "cq/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace cq {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool verify_pure(const Catalog& catalog, const std::vector<std::uint32_t>& members,
                 const QueryPattern& q, double eps) {
  const std::size_t k = members.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (!property_match(catalog[members[i]].attrs, q.elements[i].attrs, q.theta)) return false;
    for (std::size_t j = i + 1; j < k; ++j) {
      const double d = euclidean_distance(catalog[members[i]].pos, catalog[members[j]].pos);
      if (!distance_match(d, q.dist(static_cast<int>(i), static_cast<int>(j)), eps)) return false;
    }
  }
  return true;
}

}  // namespace

Algo select_algorithm(const QueryConfig& cfg, double eps) {
  if (cfg.algo != Algo::auto_select) return cfg.algo;
  return eps <= cfg.selection_threshold ? Algo::bucket_nl : Algo::mm_nl;
}

std::vector<Solution> compose(const Catalog& catalog, const BucketSet& bs, const QueryPattern& q,
                              const QueryConfig& cfg, double eps_eff, JoinCounters* counters,
                              const GeneralComposeContext* general_ctx) {
  std::vector<Solution> candidates;
  switch (select_algorithm(cfg, cfg.epsilon)) {
    case Algo::bucket_nl:
      candidates = bucket_nl(catalog, bs, q, eps_eff, counters, cfg.cycle);
      break;
    case Algo::mm_nl:
      candidates = mm_nl(catalog, bs, q, eps_eff, counters, cfg.cycle);
      break;
    case Algo::mmm_nl:
      candidates = mmm_nl(catalog, bs, q, eps_eff, counters, cfg.cycle);
      break;
    case Algo::auto_select:
      break;  // unreachable, select_algorithm resolves it
  }
  if (candidates.empty()) return candidates;

  // Map emitted ids back to catalog indices for verification.
  std::unordered_map<std::uint64_t, std::uint32_t> index_of;
  index_of.emplace(catalog[bs.anchor].id, bs.anchor);
  for (const auto& bucket : bs.buckets) {
    for (std::uint32_t idx : bucket) index_of.emplace(catalog[idx].id, idx);
  }

  // checkScale: full re-verification in pure mode, scale-interval validation
  // in general mode.
  std::vector<std::uint32_t> members(static_cast<std::size_t>(q.size()));
  std::vector<Solution> out;
  out.reserve(candidates.size());
  for (Solution& cand : candidates) {
    for (std::size_t e = 0; e < members.size(); ++e) {
      members[e] = index_of.at(cand.ids[e]);
    }

    if (general_ctx) {
      const ScaleInterval window =
          post_process(catalog, members, general_ctx->norm->pattern, general_ctx->tol);
      if (!window.satisfiable()) continue;
      // Intersect with the scale range in internal units, exactly the way the
      // brute-force oracle does, then convert to query units.
      const double max_d = general_ctx->norm->max_distance;
      const double lo = std::max(window.max_min, general_ctx->scale_lo * max_d);
      const double hi = std::min(window.min_max, general_ctx->scale_hi * max_d);
      if (lo > hi) continue;
      cand.scale_min = lo / max_d;
      cand.scale_max = hi / max_d;
    } else {
      if (!verify_pure(catalog, members, q, cfg.epsilon)) continue;
    }
    out.push_back(std::move(cand));
  }
  return out;
}

void run_parallel(std::size_t task_count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers < 1) {
    throw_error(Error::Kind::contract, "run_parallel: workers must be >= 1");
  }
  if (task_count == 0) return;
  const int nthreads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), task_count));
  if (nthreads == 1) {
    for (std::size_t t = 0; t < task_count; ++t) fn(t);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto body = [&]() {
    while (true) {
      const std::size_t t = next.fetch_add(1, std::memory_order_relaxed);
      if (t >= task_count) return;
      {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error) return;
      }
      try {
        fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct TaskOutput {
  std::vector<Solution> solutions;
  QueryStats stats;
  std::string trace;
  double filter_ms = 0.0;
  double compose_ms = 0.0;
};

void validate_config(const Catalog& catalog, const QueryPattern& q, const QueryConfig& cfg) {
  if (catalog.empty()) throw_error(Error::Kind::contract, "execute_query: empty catalog");
  if (!(cfg.epsilon >= 0.0)) throw_error(Error::Kind::contract, "execute_query: epsilon < 0");
  if (cfg.relative_e && (*cfg.relative_e < 0.0 || *cfg.relative_e >= 1.0)) {
    throw_error(Error::Kind::contract, "execute_query: relative_e must lie in [0, 1)");
  }
  if (cfg.mode == QueryMode::general && !(cfg.scale_lo > 0.0 && cfg.scale_lo <= cfg.scale_hi)) {
    throw_error(Error::Kind::contract, "execute_query: need 0 < scale_lo <= scale_hi");
  }
  if (q.has_attrs() && q.elements.front().attrs.size() != catalog.attr_count()) {
    throw_error(Error::Kind::contract,
                "execute_query: pattern attribute length does not match catalog");
  }
}

void append_trace(std::string& out, const Catalog& catalog, const BucketSet& bs) {
  std::ostringstream os;
  os << "{\"anchor\":" << catalog[bs.anchor].id << ",\"buckets\":[";
  bool first = true;
  for (std::size_t i = 0; i < bs.buckets.size(); ++i) {
    if (static_cast<int>(i) == bs.anchor_element) continue;
    if (!first) os << ',';
    first = false;
    os << "{\"element\":" << i << ",\"size\":" << bs.buckets[i].size() << '}';
  }
  os << "]}\n";
  out += os.str();
}

QueryResult execute_pure(const Catalog& catalog, const QueryPattern& q, const QueryConfig& cfg) {
  const auto t_start = Clock::now();
  QueryResult result;

  const double eps_eff = cfg.epsilon;
  const double build_eps = std::max(cfg.epsilon, 1e-300);
  const Quadtree tree = Quadtree::build(catalog, build_eps, cfg.max_depth);
  result.stats.elapsed.build_ms = ms_since(t_start);

  const auto level_nodes = tree.entry_nodes();
  std::vector<TaskOutput> outputs(level_nodes.size());

  run_parallel(level_nodes.size(), cfg.workers, [&](std::size_t t) {
    const QuadNode& node = *level_nodes[t];
    TaskOutput& out = outputs[t];
    out.stats.anchors_total = node.points.size();
    if (node.points.empty()) return;

    const auto t_filter = Clock::now();
    FilterCounters fc;
    const auto anchors = anchor_candidates(catalog, q, node);
    std::map<std::uint32_t, BucketSet> acc;
    if (!anchors.empty()) {
      const auto nearby = filter_neighbors(q, tree, node, level_nodes, eps_eff);
      for (const QuadNode* ne : nearby) {
        find_matching_stars(acc, catalog, q, node, anchors, *ne, eps_eff, &fc, cfg.descend);
      }
    }
    out.filter_ms = ms_since(t_filter);
    out.stats.comparisons += fc.star_comparisons;

    const auto t_compose = Clock::now();
    JoinCounters jc;
    for (auto& [anchor_idx, bs] : acc) {
      out.stats.candidate_pairs += bs.candidate_count();
      if (cfg.trace_filter) append_trace(out.trace, catalog, bs);
      if (!bs.productive()) continue;
      ++out.stats.anchors_productive;
      out.stats.productive_bucket_elements += bs.candidate_count();

      if (cfg.mode == QueryMode::existential) {
        if (!out.stats.match_exists && existential(catalog, bs, q, eps_eff, &jc)) {
          out.stats.match_exists = true;
        }
      } else {
        auto sols = compose(catalog, bs, q, cfg, eps_eff, &jc);
        out.solutions.insert(out.solutions.end(), std::make_move_iterator(sols.begin()),
                             std::make_move_iterator(sols.end()));
      }
    }
    out.compose_ms = ms_since(t_compose);
    out.stats.comparisons += jc.pair_probes;
  });

  // Deterministic merge in task order, then canonical global order.
  for (TaskOutput& out : outputs) {
    result.solutions.insert(result.solutions.end(),
                            std::make_move_iterator(out.solutions.begin()),
                            std::make_move_iterator(out.solutions.end()));
    result.stats.anchors_total += out.stats.anchors_total;
    result.stats.anchors_productive += out.stats.anchors_productive;
    result.stats.candidate_pairs += out.stats.candidate_pairs;
    result.stats.productive_bucket_elements += out.stats.productive_bucket_elements;
    result.stats.comparisons += out.stats.comparisons;
    result.stats.match_exists = result.stats.match_exists || out.stats.match_exists;
    result.stats.elapsed.filter_ms += out.filter_ms;
    result.stats.elapsed.compose_ms += out.compose_ms;
    if (cfg.trace_filter && !out.trace.empty()) result.trace.push_back(std::move(out.trace));
  }
  std::sort(result.solutions.begin(), result.solutions.end());
  result.solutions.erase(std::unique(result.solutions.begin(), result.solutions.end()),
                         result.solutions.end());
  result.stats.solutions = result.solutions.size();
  result.stats.elapsed.total_ms = ms_since(t_start);
  return result;
}

QueryResult execute_general(const Catalog& catalog, const QueryPattern& q,
                            const QueryConfig& cfg) {
  const auto t_start = Clock::now();
  QueryResult result;

  GeneralConfig gcfg;
  gcfg.tol = cfg.relative_e
                 ? GeneralTolerance{EpsilonMode::proportional, *cfg.relative_e}
                 : GeneralTolerance{EpsilonMode::constant, cfg.epsilon};
  gcfg.scale_lo = cfg.scale_lo;
  gcfg.scale_hi = cfg.scale_hi;
  gcfg.symmetric_pair_skip = cfg.symmetric_pair_skip;

  const NormalizedPattern norm = normalize_pattern(q);
  const auto [band_lo, band_hi] = candidate_pair_band(norm, gcfg);

  const double build_eps = std::max(effective_search_epsilon(band_hi, gcfg.tol), 1e-300);
  const Quadtree tree = Quadtree::build(catalog, build_eps, cfg.max_depth);
  result.stats.elapsed.build_ms = ms_since(t_start);

  GeneralComposeContext ctx;
  ctx.norm = &norm;
  ctx.tol = gcfg.tol;
  ctx.scale_lo = cfg.scale_lo;
  ctx.scale_hi = cfg.scale_hi;

  std::vector<TaskOutput> outputs(catalog.size());
  run_parallel(catalog.size(), cfg.workers, [&](std::size_t t) {
    TaskOutput& out = outputs[t];
    const auto t_filter = Clock::now();
    FilterCounters fc;
    auto candidates =
        general_candidates_for_star(catalog, tree, norm, gcfg, static_cast<std::uint32_t>(t), &fc);
    out.filter_ms = ms_since(t_filter);
    out.stats.comparisons += fc.star_comparisons;
    out.stats.anchors_total += fc.pairs_examined;

    const auto t_compose = Clock::now();
    JoinCounters jc;
    for (auto& cand : candidates) {
      out.stats.candidate_pairs += cand.buckets.candidate_count();
      if (cfg.trace_filter) append_trace(out.trace, catalog, cand.buckets);
      if (!cand.buckets.productive()) continue;
      ++out.stats.anchors_productive;
      out.stats.productive_bucket_elements += cand.buckets.candidate_count();

      // The join runs against the pattern scaled to this candidate pair.
      QueryPattern scaled = norm.pattern;
      for (double& d : scaled.dist_matrix) d *= cand.scalebasic;
      scaled.min_pair_distance = norm.pattern.min_pair_distance * cand.scalebasic;
      scaled.max_anchor_distance = norm.pattern.max_anchor_distance * cand.scalebasic;
      const double budget = effective_search_epsilon(cand.scalebasic, gcfg.tol);
      auto sols = compose(catalog, cand.buckets, scaled, cfg, budget, &jc, &ctx);
      out.solutions.insert(out.solutions.end(), std::make_move_iterator(sols.begin()),
                           std::make_move_iterator(sols.end()));
    }
    out.compose_ms = ms_since(t_compose);
    out.stats.comparisons += jc.pair_probes;
  });

  for (TaskOutput& out : outputs) {
    result.solutions.insert(result.solutions.end(),
                            std::make_move_iterator(out.solutions.begin()),
                            std::make_move_iterator(out.solutions.end()));
    result.stats.anchors_total += out.stats.anchors_total;
    result.stats.anchors_productive += out.stats.anchors_productive;
    result.stats.candidate_pairs += out.stats.candidate_pairs;
    result.stats.productive_bucket_elements += out.stats.productive_bucket_elements;
    result.stats.comparisons += out.stats.comparisons;
    result.stats.elapsed.filter_ms += out.filter_ms;
    result.stats.elapsed.compose_ms += out.compose_ms;
    if (cfg.trace_filter && !out.trace.empty()) result.trace.push_back(std::move(out.trace));
  }
  std::sort(result.solutions.begin(), result.solutions.end());
  result.solutions.erase(std::unique(result.solutions.begin(), result.solutions.end()),
                         result.solutions.end());
  result.stats.solutions = result.solutions.size();
  result.stats.match_exists = !result.solutions.empty();
  result.stats.elapsed.total_ms = ms_since(t_start);
  return result;
}

}  // namespace

QueryResult execute_query(const Catalog& catalog, const QueryPattern& q, const QueryConfig& cfg) {
  validate_config(catalog, q, cfg);
  if (cfg.mode == QueryMode::general) return execute_general(catalog, q, cfg);
  return execute_pure(catalog, q, cfg);
}

}  // namespace cq
