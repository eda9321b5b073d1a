#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cq/composition.hpp"
#include "cq/general.hpp"

namespace cq {

enum class QueryMode { pure, general, existential };
enum class Algo { bucket_nl, mm_nl, mmm_nl, auto_select };

struct QueryConfig {
  QueryMode mode = QueryMode::pure;
  Algo algo = Algo::auto_select;
  double epsilon = 0.0;
  double theta = 0.0;
  int workers = 1;

  // Auto selection: bucket_nl while epsilon <= threshold, mm_nl above. The
  // default cutover is dataset-density dependent, hence configurable.
  double selection_threshold = 0.003;

  CycleOrder cycle = CycleOrder::by_index;
  bool descend = true;  // false: scan entry-node pairs directly (no cost model)
  int max_depth = Quadtree::kDefaultMaxDepth;

  // general mode
  double scale_lo = 0.5;
  double scale_hi = 2.0;
  std::optional<double> relative_e;  // proportional tolerance, < 1
  bool symmetric_pair_skip = false;

  bool trace_filter = false;  // emit per-anchor bucket sizes as JSON lines
};

struct StageTimes {
  double build_ms = 0.0;
  double filter_ms = 0.0;
  double compose_ms = 0.0;
  double total_ms = 0.0;
};

struct QueryStats {
  std::uint64_t anchors_total = 0;       // anchor stars (pure) / candidate pairs (general)
  std::uint64_t anchors_productive = 0;  // those whose buckets were all non-empty
  std::uint64_t candidate_pairs = 0;     // bucket entries produced by filtering
  std::uint64_t productive_bucket_elements = 0;
  std::uint64_t solutions = 0;
  std::uint64_t comparisons = 0;  // star-pair distance evaluations, all stages
  bool match_exists = false;      // existential mode answer
  StageTimes elapsed;
};

struct QueryResult {
  std::vector<Solution> solutions;  // sorted by id sequence, unique
  QueryStats stats;
  std::vector<std::string> trace;  // JSON lines when cfg.trace_filter
};

/// Concrete composition algorithm for this run.
Algo select_algorithm(const QueryConfig& cfg, double eps);

/// Runs the selected composition algorithm on one bucket set and verifies
/// every candidate against the mode's matching contract before returning it.
/// In general mode `general_ctx` supplies the normalized pattern/tolerances
/// and solutions carry their scale interval.
struct GeneralComposeContext {
  const NormalizedPattern* norm = nullptr;
  GeneralTolerance tol;
  double scale_lo = 0.0;  // user units
  double scale_hi = 0.0;
};

std::vector<Solution> compose(const Catalog& catalog, const BucketSet& bs, const QueryPattern& q,
                              const QueryConfig& cfg, double eps_eff,
                              JoinCounters* counters = nullptr,
                              const GeneralComposeContext* general_ctx = nullptr);

/// Full pipeline: quadtree build, per-anchor filtering, composition, and a
/// deterministic merge. The output is a pure function of (catalog, pattern,
/// cfg minus workers).
QueryResult execute_query(const Catalog& catalog, const QueryPattern& q, const QueryConfig& cfg);

/// Runs fn(task_index) for every task on `workers` threads and returns the
/// per-task results in task order. Exceptions propagate to the caller.
void run_parallel(std::size_t task_count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace cq
