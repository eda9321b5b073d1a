#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cq/filtering.hpp"

namespace cq {

/// One matched sequence: ids[p] is the catalog id playing query element p.
/// Pure-mode solutions keep the unit scale; general mode fills the satisfying
/// scale interval.
struct Solution {
  std::vector<std::uint64_t> ids;
  double scale_min = 1.0;
  double scale_max = 1.0;
};

inline bool operator<(const Solution& a, const Solution& b) { return a.ids < b.ids; }
inline bool operator==(const Solution& a, const Solution& b) { return a.ids == b.ids; }

/// Dense boolean matrix, rows packed into 64-bit words, AND/OR semiring.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64), bits_(rows * words_per_row_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void set(std::size_t r, std::size_t c) { bits_[r * words_per_row_ + c / 64] |= 1ull << (c % 64); }
  bool test(std::size_t r, std::size_t c) const {
    return (bits_[r * words_per_row_ + c / 64] >> (c % 64)) & 1ull;
  }

  /// Boolean product over (AND, OR): for each set bit k of a row, OR in rhs
  /// row k. Plain cubic schoolbook on packed words.
  BitMatrix multiply(const BitMatrix& rhs) const;

  /// Row indices whose diagonal bit is set (square matrices only).
  std::vector<std::uint32_t> diagonal_ones() const;

 private:
  std::size_t rows_ = 0, cols_ = 0, words_per_row_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Pairwise compatibility between two buckets: bit (r,c) is set iff the stars
/// distance-match the query pair (row_element, col_element) within eps_eff and
/// carry distinct ids.
struct PairMatrix {
  int row_element = 0;
  int col_element = 0;
  BitMatrix bits;
};

struct JoinCounters {
  std::uint64_t pair_probes = 0;      // distance evaluations inside joins/matrices
  std::uint64_t tuples_extended = 0;  // partial assignments visited
};

enum class CycleOrder { by_index, by_size };

constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

/// The non-anchor elements in join order. by_index is the default; by_size
/// orders buckets smallest-first.
std::vector<int> composition_cycle(const QueryPattern& q, const BucketSet& bs, CycleOrder order);

/// One PairMatrix per consecutive cycle pair, wrapping at the end.
std::vector<PairMatrix> build_pair_matrices(const Catalog& catalog, const BucketSet& bs,
                                            const QueryPattern& q, double eps_eff,
                                            std::span<const int> cycle,
                                            JoinCounters* counters = nullptr);

/// Boolean chain product with diagonal test: surviving row indices of the
/// head bucket. Elements outside the set cannot close any cyclic chain.
std::vector<std::uint32_t> mm_diagonal_filter(std::span<const PairMatrix> matrices);

/// Cyclic nested-loop join over the buckets with every pairwise constraint
/// (neighbors and non-neighbors) checked eagerly while tuples are extended.
/// The anchor star is fixed at the anchor element. Stops after `limit`
/// solutions.
std::vector<Solution> bucket_nl(const Catalog& catalog, const BucketSet& bs, const QueryPattern& q,
                                double eps_eff, JoinCounters* counters = nullptr,
                                CycleOrder order = CycleOrder::by_index,
                                std::size_t limit = kNoLimit);

/// One matrix-filter pass over a single cycle, head-bucket reduction, then
/// bucket_nl. Same solution set as bucket_nl.
std::vector<Solution> mm_nl(const Catalog& catalog, const BucketSet& bs, const QueryPattern& q,
                            double eps_eff, JoinCounters* counters = nullptr,
                            CycleOrder order = CycleOrder::by_index);

/// Matrix filtering for every rotation of the cycle, reducing each rotation's
/// head bucket, then bucket_nl. Same solution set as bucket_nl.
std::vector<Solution> mmm_nl(const Catalog& catalog, const BucketSet& bs, const QueryPattern& q,
                             double eps_eff, JoinCounters* counters = nullptr,
                             CycleOrder order = CycleOrder::by_index);

/// True iff this bucket set yields any solution. The matrix diagonal refutes
/// cheaply when it can; otherwise the join runs with limit 1.
bool existential(const Catalog& catalog, const BucketSet& bs, const QueryPattern& q,
                 double eps_eff, JoinCounters* counters = nullptr);

}  // namespace cq
