#include "cq/composition.hpp"

#include <algorithm>
#include <string>

namespace cq {

BitMatrix BitMatrix::multiply(const BitMatrix& rhs) const {
  if (cols_ != rhs.rows_) {
    throw_error(Error::Kind::contract, "BitMatrix::multiply: dimension mismatch " +
                                           std::to_string(cols_) + " vs " +
                                           std::to_string(rhs.rows_));
  }
  BitMatrix out(rows_, rhs.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::uint64_t* out_row = out.bits_.data() + r * out.words_per_row_;
    const std::uint64_t* row = bits_.data() + r * words_per_row_;
    for (std::size_t w = 0; w < words_per_row_; ++w) {
      std::uint64_t word = row[w];
      while (word) {
        const int bit = std::countr_zero(word);
        word &= word - 1;
        const std::size_t k = w * 64 + static_cast<std::size_t>(bit);
        const std::uint64_t* rhs_row = rhs.bits_.data() + k * rhs.words_per_row_;
        for (std::size_t j = 0; j < rhs.words_per_row_; ++j) out_row[j] |= rhs_row[j];
      }
    }
  }
  return out;
}

std::vector<std::uint32_t> BitMatrix::diagonal_ones() const {
  if (rows_ != cols_) {
    throw_error(Error::Kind::contract, "diagonal_ones: matrix is not square");
  }
  std::vector<std::uint32_t> out;
  for (std::size_t r = 0; r < rows_; ++r) {
    if (test(r, r)) out.push_back(static_cast<std::uint32_t>(r));
  }
  return out;
}

std::vector<int> composition_cycle(const QueryPattern& q, const BucketSet& bs, CycleOrder order) {
  std::vector<int> cycle;
  for (int i = 0; i < q.size(); ++i) {
    if (i != bs.anchor_element) cycle.push_back(i);
  }
  if (order == CycleOrder::by_size) {
    std::stable_sort(cycle.begin(), cycle.end(), [&](int a, int b) {
      return bs.buckets[static_cast<std::size_t>(a)].size() <
             bs.buckets[static_cast<std::size_t>(b)].size();
    });
  }
  return cycle;
}

std::vector<PairMatrix> build_pair_matrices(const Catalog& catalog, const BucketSet& bs,
                                            const QueryPattern& q, double eps_eff,
                                            std::span<const int> cycle, JoinCounters* counters) {
  std::vector<PairMatrix> out;
  out.reserve(cycle.size());
  for (std::size_t t = 0; t < cycle.size(); ++t) {
    const int ei = cycle[t];
    const int ej = cycle[(t + 1) % cycle.size()];
    const auto& bi = bs.buckets[static_cast<std::size_t>(ei)];
    const auto& bj = bs.buckets[static_cast<std::size_t>(ej)];
    PairMatrix m;
    m.row_element = ei;
    m.col_element = ej;
    m.bits = BitMatrix(bi.size(), bj.size());
    const double target = q.dist(ei, ej);
    for (std::size_t r = 0; r < bi.size(); ++r) {
      const Point& pr = catalog[bi[r]];
      for (std::size_t c = 0; c < bj.size(); ++c) {
        const Point& pc = catalog[bj[c]];
        if (pr.id == pc.id) continue;
        if (counters) ++counters->pair_probes;
        if (distance_match(euclidean_distance(pr.pos, pc.pos), target, eps_eff)) {
          m.bits.set(r, c);
        }
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::uint32_t> mm_diagonal_filter(std::span<const PairMatrix> matrices) {
  if (matrices.empty()) {
    throw_error(Error::Kind::contract, "mm_diagonal_filter: empty matrix chain");
  }
  for (std::size_t t = 0; t + 1 < matrices.size(); ++t) {
    if (matrices[t].bits.cols() != matrices[t + 1].bits.rows()) {
      throw_error(Error::Kind::contract, "mm_diagonal_filter: chain dimensions do not agree");
    }
  }
  if (matrices.back().bits.cols() != matrices.front().bits.rows()) {
    throw_error(Error::Kind::contract, "mm_diagonal_filter: chain does not close on the head");
  }
  BitMatrix product = matrices.front().bits;
  for (std::size_t t = 1; t < matrices.size(); ++t) {
    product = product.multiply(matrices[t].bits);
  }
  return product.diagonal_ones();
}

namespace {

struct JoinState {
  const Catalog& catalog;
  const BucketSet& bs;
  const QueryPattern& q;
  double eps_eff;
  std::span<const int> cycle;
  JoinCounters* counters;
  std::size_t limit;

  std::vector<std::uint32_t> chosen;  // catalog index per cycle slot
  std::vector<Solution> out;
};

// Places cycle[depth]; every pairwise constraint against already-placed stars
// (anchor included) is checked here, so completed tuples need no final pass.
void extend(JoinState& st, std::size_t depth) {
  if (st.out.size() >= st.limit) return;
  if (depth == st.cycle.size()) {
    Solution s;
    s.ids.resize(static_cast<std::size_t>(st.q.size()));
    s.ids[static_cast<std::size_t>(st.bs.anchor_element)] = st.catalog[st.bs.anchor].id;
    for (std::size_t t = 0; t < st.cycle.size(); ++t) {
      s.ids[static_cast<std::size_t>(st.cycle[t])] = st.catalog[st.chosen[t]].id;
    }
    st.out.push_back(std::move(s));
    return;
  }

  const int elem = st.cycle[depth];
  const Point& anchor_pt = st.catalog[st.bs.anchor];
  for (std::uint32_t cand : st.bs.buckets[static_cast<std::size_t>(elem)]) {
    const Point& pc = st.catalog[cand];
    if (pc.id == anchor_pt.id) continue;
    if (st.counters) ++st.counters->tuples_extended;
    bool ok = true;
    for (std::size_t t = 0; t < depth && ok; ++t) {
      const Point& prev = st.catalog[st.chosen[t]];
      if (prev.id == pc.id) {
        ok = false;
        break;
      }
      if (st.counters) ++st.counters->pair_probes;
      ok = distance_match(euclidean_distance(prev.pos, pc.pos), st.q.dist(st.cycle[t], elem),
                          st.eps_eff);
    }
    if (!ok) continue;
    st.chosen[depth] = cand;
    extend(st, depth + 1);
    if (st.out.size() >= st.limit) return;
  }
}

BucketSet reduce_bucket(const BucketSet& bs, int element, const std::vector<std::uint32_t>& keep) {
  BucketSet reduced = bs;
  auto& bucket = reduced.buckets[static_cast<std::size_t>(element)];
  std::vector<std::uint32_t> next;
  next.reserve(keep.size());
  for (std::uint32_t row : keep) next.push_back(bucket[row]);
  bucket = std::move(next);
  return reduced;
}

}  // namespace

std::vector<Solution> bucket_nl(const Catalog& catalog, const BucketSet& bs, const QueryPattern& q,
                                double eps_eff, JoinCounters* counters, CycleOrder order,
                                std::size_t limit) {
  if (!bs.productive()) return {};
  const auto cycle = composition_cycle(q, bs, order);
  JoinState st{catalog, bs, q, eps_eff, cycle, counters, limit, {}, {}};
  st.chosen.resize(cycle.size());
  extend(st, 0);
  return std::move(st.out);
}

std::vector<Solution> mm_nl(const Catalog& catalog, const BucketSet& bs, const QueryPattern& q,
                            double eps_eff, JoinCounters* counters, CycleOrder order) {
  if (!bs.productive()) return {};
  const auto cycle = composition_cycle(q, bs, order);
  if (cycle.size() < 2) return bucket_nl(catalog, bs, q, eps_eff, counters, order);

  const auto matrices = build_pair_matrices(catalog, bs, q, eps_eff, cycle, counters);
  const auto survivors = mm_diagonal_filter(matrices);
  if (survivors.empty()) return {};
  const BucketSet reduced = reduce_bucket(bs, cycle.front(), survivors);
  return bucket_nl(catalog, reduced, q, eps_eff, counters, order);
}

std::vector<Solution> mmm_nl(const Catalog& catalog, const BucketSet& bs, const QueryPattern& q,
                             double eps_eff, JoinCounters* counters, CycleOrder order) {
  if (!bs.productive()) return {};
  const auto cycle = composition_cycle(q, bs, order);
  if (cycle.size() < 2) return bucket_nl(catalog, bs, q, eps_eff, counters, order);

  const auto matrices = build_pair_matrices(catalog, bs, q, eps_eff, cycle, counters);

  BucketSet reduced = bs;
  std::vector<PairMatrix> rotation(matrices.size());
  for (std::size_t r = 0; r < matrices.size(); ++r) {
    for (std::size_t t = 0; t < matrices.size(); ++t) {
      rotation[t] = matrices[(r + t) % matrices.size()];
    }
    const auto survivors = mm_diagonal_filter(rotation);
    if (survivors.empty()) return {};
    reduced = reduce_bucket(reduced, cycle[r], survivors);
  }
  return bucket_nl(catalog, reduced, q, eps_eff, counters, order);
}

bool existential(const Catalog& catalog, const BucketSet& bs, const QueryPattern& q,
                 double eps_eff, JoinCounters* counters) {
  if (!bs.productive()) return false;
  const auto cycle = composition_cycle(q, bs, CycleOrder::by_index);
  if (cycle.size() >= 2) {
    const auto matrices = build_pair_matrices(catalog, bs, q, eps_eff, cycle, counters);
    if (mm_diagonal_filter(matrices).empty()) return false;
  }
  return !bucket_nl(catalog, bs, q, eps_eff, counters, CycleOrder::by_index, 1).empty();
}

}  // namespace cq
