#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cq/engine.hpp"
#include "cq/io.hpp"
#include "cq/oracle.hpp"

namespace cq::cli {

struct IndexOptions {
  std::string catalog_path;
  std::vector<std::string> attr_columns;
  double epsilon = 0.0;
  int max_depth = Quadtree::kDefaultMaxDepth;
  bool stats = false;
};

struct QueryOptions {
  std::string catalog_path;
  std::vector<std::string> attr_columns;
  std::string pattern_path;
  std::optional<double> epsilon;
  std::optional<double> theta;
  std::optional<int> anchor;
  QueryConfig cfg;
  std::string out_path;    // solutions CSV
  std::string stats_path;  // stats JSON
  std::string trace_path;  // filter trace JSON lines
};

struct GenerateOptions {
  std::string kind;  // "uniform" | "dense"
  std::size_t n = 0;
  Rect region{0, 0, 1, 1};
  std::uint64_t seed = 0;
  std::string out_path;
  // uniform
  std::vector<std::pair<double, double>> attr_ranges;
  // dense
  std::string pattern_path;
  double scale_lo = 1.0;
  double scale_hi = 1.0;
  std::size_t planted = 0;
};

struct OracleOptions {
  std::string catalog_path;
  std::vector<std::string> attr_columns;
  std::string pattern_path;
  std::string mode = "pure";  // pure | general
  std::optional<double> epsilon;
  std::optional<double> theta;
  std::optional<int> anchor;
  double scale_lo = 0.5;
  double scale_hi = 2.0;
  std::optional<double> relative_e;
  std::size_t cap = kOracleDefaultCap;
  std::string out_path;
  std::string stats_path;
};

struct BenchCell {
  double epsilon = 0.0;
  Algo algo = Algo::bucket_nl;
  std::vector<double> elapsed_ms;  // one entry per repetition
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double ci_ms = 0.0;  // conf = alpha * sigma / sqrt(n)
  std::uint64_t anchors_productive = 0;
  std::uint64_t solutions = 0;
  std::uint64_t comparisons = 0;
  double mean_bucket_occupancy = 0.0;
};

struct BenchReport {
  std::vector<double> epsilons;
  std::vector<Algo> algos;
  std::vector<BenchCell> cells;  // epsilon-major order
  std::optional<double> crossover_epsilon;  // smallest eps where mm_nl median beats bucket_nl
  double confidence_level = 0.95;
  int reps = 0;
  std::string environment;

  const BenchCell* cell(double epsilon, Algo algo) const;
};

struct BenchOptions {
  std::string catalog_path;
  std::vector<std::string> attr_columns;
  std::string pattern_path;
  std::optional<double> theta;
  std::vector<double> epsilons;
  std::vector<Algo> algos;
  int reps = 5;
  int workers = 1;
  std::string out_path;      // JSON report
  std::string csv_path;      // flat CSV
  std::string gnuplot_path;  // optional plot script
};

/// Runs every (epsilon, algo) cell reps times on an already-loaded input.
BenchReport run_bench(const Catalog& catalog, const QueryPattern& pattern,
                      const std::vector<double>& epsilons, const std::vector<Algo>& algos,
                      int reps, int workers);

struct ScaleupRow {
  std::size_t size = 0;
  std::size_t planted = 0;
  std::uint64_t solutions = 0;
  double elapsed_ms = 0.0;
  std::optional<std::uint64_t> expected;
};

struct ScaleupReport {
  std::vector<ScaleupRow> rows;
  bool counts_nondecreasing = true;
  bool expectations_met = true;             // only meaningful with oracle_check
  std::uint64_t solutions_per_instance = 0; // oracle-measured multiplicity
};

struct ScaleupOptions {
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> planted;  // one per size
  std::string pattern_path;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  Rect region{0, 0, 1, 1};
  double scale_lo = 1.00000001;  // planting interval
  double scale_hi = 1.0000009;
  int workers = 1;
  bool oracle_check = false;  // verify counts against the oracle at the smallest size
  std::string out_path;
};

ScaleupReport run_scaleup(const QueryPattern& base, const ScaleupOptions& opt);

int cmd_index(const IndexOptions& opt, std::ostream& out, std::ostream& err);
int cmd_query(const QueryOptions& opt, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_oracle(const OracleOptions& opt, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err);
int cmd_scaleup(const ScaleupOptions& opt, std::ostream& out, std::ostream& err);

const char* algo_name(Algo algo);
Algo parse_algo(const std::string& name);

}  // namespace cq::cli
