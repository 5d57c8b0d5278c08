// Conversions between span indices and row/column adjacency matrices, the
// span-recovery post-processing, and the class-balanced pair sampler.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "tabstruct/core.hpp"
#include "tabstruct/rng.hpp"

namespace tabstruct {

/// Two cells share a row when their row intervals intersect (same for
/// columns). Indexing follows the order of `t.cells`.
inline AdjacencyMatrices spans_to_adjacency(const TableAnnotation& t) {
  require_spans(t);
  require_valid(t);
  const std::size_t n = t.n_cells();
  AdjacencyMatrices adj{BinaryMatrix(n), BinaryMatrix(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = *t.cells[i].spans;
    for (std::size_t j = i; j < n; ++j) {
      const auto& b = *t.cells[j].spans;
      adj.row.set_symmetric(i, j, a.sr <= b.er && b.sr <= a.er);
      adj.col.set_symmetric(i, j, a.sc <= b.ec && b.sc <= a.ec);
    }
  }
  return adj;
}

/// How a fresh row/column index spreads from the pivot cell.
enum class PropagationRule {
  /// Every cell connected to the pivot receives the index. This is the
  /// textbook rule; it merges two grid rows whenever the pivot spans both.
  kAllNeighbours,
  /// Neighbours are visited in sort order and receive the index only if they
  /// are connected to every cell that already holds it, so each index marks a
  /// clique (one grid line). Identical to kAllNeighbours whenever the
  /// pivot's neighbourhood is itself a clique.
  kClique,
};

namespace detail {

// Belonging lists for one axis. `order` is the sweep order of cells.
inline std::vector<std::vector<int>> assign_lines(const BinaryMatrix& m,
                                                  const std::vector<std::size_t>& order,
                                                  PropagationRule rule) {
  std::vector<std::vector<int>> belongs(m.size());
  int next_index = 0;
  for (std::size_t pivot : order) {
    if (!belongs[pivot].empty()) continue;
    std::vector<std::size_t> members{pivot};
    for (std::size_t q : order) {
      if (q == pivot || !m.at(pivot, q)) continue;
      if (rule == PropagationRule::kClique &&
          !std::all_of(members.begin(), members.end(),
                       [&](std::size_t held) { return m.at(held, q); }))
        continue;
      members.push_back(q);
    }
    for (std::size_t c : members) belongs[c].push_back(next_index);
    ++next_index;
  }
  return belongs;
}

// Sort by primary start coordinate, then the other start coordinate, then id.
inline std::vector<std::size_t> sweep_order(const std::vector<CellBox>& cells, bool by_y) {
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ba = cells[a].bbox;
    const auto& bb = cells[b].bbox;
    const auto ka = by_y ? std::tuple(ba.y1, ba.x1, cells[a].id) : std::tuple(ba.x1, ba.y1, cells[a].id);
    const auto kb = by_y ? std::tuple(bb.y1, bb.x1, cells[b].id) : std::tuple(bb.x1, bb.y1, cells[b].id);
    return ka < kb;
  });
  return order;
}

}  // namespace detail

/// Recovers span indices from cell geometry and adjacency. Rows: cells are
/// swept by y1; the first cell without a row index becomes the pivot, takes
/// the next fresh index and shares it with connected cells; SR/ER are the
/// min/max of each cell's belonging list. Columns are the same with x1 and
/// the column matrix. Existing spans on `cells` are ignored.
inline TableAnnotation adjacency_to_spans(const std::vector<CellBox>& cells,
                                          const AdjacencyMatrices& adj,
                                          PropagationRule rule = PropagationRule::kClique) {
  const std::size_t n = cells.size();
  if (adj.row.size() != n || adj.col.size() != n)
    throw Error(ErrorCode::kDimensionMismatch,
                "adjacency is " + std::to_string(adj.row.size()) + "x" + std::to_string(adj.row.size()) +
                    " / " + std::to_string(adj.col.size()) + "x" + std::to_string(adj.col.size()) +
                    " for " + std::to_string(n) + " cells");
  if (!adj.row.symmetric()) throw Error(ErrorCode::kNonSymmetric, "row adjacency is not symmetric");
  if (!adj.col.symmetric()) throw Error(ErrorCode::kNonSymmetric, "column adjacency is not symmetric");

  const auto rows = detail::assign_lines(adj.row, detail::sweep_order(cells, true), rule);
  const auto cols = detail::assign_lines(adj.col, detail::sweep_order(cells, false), rule);

  TableAnnotation out;
  out.cells = cells;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [sr, er] = std::minmax_element(rows[i].begin(), rows[i].end());
    const auto [sc, ec] = std::minmax_element(cols[i].begin(), cols[i].end());
    out.cells[i].spans = SpanIndices{*sr, *er, *sc, *ec};
  }
  return out;
}

inline TableAnnotation adjacency_to_spans(const TableAnnotation& t, const AdjacencyMatrices& adj,
                                          PropagationRule rule = PropagationRule::kClique) {
  return adjacency_to_spans(t.cells, adj, rule);
}

/// Order-preserving renumbering of the distinct row and column indices used
/// by the table, so that labels form 0..k-1 without gaps.
inline TableAnnotation canonicalize_spans(const TableAnnotation& t) {
  require_spans(t);
  std::map<int, int> rows, cols;
  for (const auto& c : t.cells) {
    rows[c.spans->sr];
    rows[c.spans->er];
    cols[c.spans->sc];
    cols[c.spans->ec];
  }
  int k = 0;
  for (auto& [v, rank] : rows) rank = k++;
  k = 0;
  for (auto& [v, rank] : cols) rank = k++;
  TableAnnotation out = t;
  for (auto& c : out.cells) {
    auto& s = *c.spans;
    s = {rows.at(s.sr), rows.at(s.er), cols.at(s.sc), cols.at(s.ec)};
  }
  return out;
}

struct ConsistencyReport {
  bool row_consistent = true;
  bool col_consistent = true;
  /// Off-diagonal pairs (i < j) whose entry differs after the roundtrip.
  std::vector<std::pair<std::size_t, std::size_t>> row_diffs;
  std::vector<std::pair<std::size_t, std::size_t>> col_diffs;

  bool consistent() const { return row_consistent && col_consistent; }
};

/// Runs adjacency -> spans -> adjacency and reports every pair that changed.
/// Geometry from `cells` fixes the sweep order; without it cells are swept in
/// index order.
inline ConsistencyReport check_consistency(const AdjacencyMatrices& adj,
                                           const std::vector<CellBox>* cells = nullptr,
                                           PropagationRule rule = PropagationRule::kClique) {
  std::vector<CellBox> placeholder;
  if (cells == nullptr) {
    for (std::size_t i = 0; i < adj.n(); ++i) {
      const double v = static_cast<double>(i);
      placeholder.push_back({static_cast<int>(i), {v, v, v + 1.0, v + 1.0}, std::nullopt, "x"});
    }
    cells = &placeholder;
  }
  TableAnnotation spanned = adjacency_to_spans(*cells, adj, rule);
  // Recovered spans may overlap on inconsistent input; compare intervals directly.
  ConsistencyReport report;
  const std::size_t n = adj.n();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = *spanned.cells[i].spans;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b = *spanned.cells[j].spans;
      const bool row = a.sr <= b.er && b.sr <= a.er;
      const bool col = a.sc <= b.ec && b.sc <= a.ec;
      if (row != adj.row.at(i, j)) report.row_diffs.emplace_back(i, j);
      if (col != adj.col.at(i, j)) report.col_diffs.emplace_back(i, j);
    }
  }
  report.row_consistent = report.row_diffs.empty();
  report.col_consistent = report.col_diffs.empty();
  return report;
}

struct SampledPair {
  std::size_t i = 0;
  std::size_t j = 0;
  bool row_label = false;
  bool col_label = false;

  friend bool operator==(const SampledPair&, const SampledPair&) = default;
};

namespace detail {

// Draws from one stratum: without replacement until every member was drawn
// once, then with replacement.
class StratumPool {
 public:
  void add(std::size_t i, std::size_t j) { pairs_.emplace_back(i, j); }
  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }

  std::pair<std::size_t, std::size_t> draw(Pcg32& rng) {
    if (remaining_ == 0 && !fresh_) {
      return pairs_[rng.below(static_cast<std::uint32_t>(pairs_.size()))];
    }
    if (fresh_) {
      remaining_ = pairs_.size();
      fresh_ = false;
    }
    const std::size_t k = rng.below(static_cast<std::uint32_t>(remaining_));
    std::swap(pairs_[k], pairs_[remaining_ - 1]);
    --remaining_;
    return pairs_[remaining_];
  }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::size_t remaining_ = 0;
  bool fresh_ = true;
};

// Probability of a column-positive draw inside each row class, chosen closest
// (least squares) to the natural proportions subject to an overall 50/50
// column split. Falls back to natural proportions when that is infeasible.
inline std::pair<double, double> column_shares(double p_row1, const std::size_t n[2][2]) {
  auto natural = [&](int r) {
    const std::size_t total = n[r][0] + n[r][1];
    return total == 0 ? 0.0 : static_cast<double>(n[r][1]) / static_cast<double>(total);
  };
  auto lo = [&](int r) { return n[r][0] == 0 ? 1.0 : 0.0; };
  auto hi = [&](int r) { return n[r][1] == 0 ? 0.0 : 1.0; };
  double q0 = natural(0), q1 = natural(1);
  const bool both_cols = (n[0][1] + n[1][1]) > 0 && (n[0][0] + n[1][0]) > 0;
  if (!both_cols) return {q0, q1};
  const double w1 = p_row1, w0 = 1.0 - p_row1;
  if (w0 == 0.0) return {q0, std::clamp(0.5, lo(1), hi(1))};
  if (w1 == 0.0) return {std::clamp(0.5, lo(0), hi(0)), q1};
  // Minimise (q0-a)^2 + (q1-b)^2 subject to w0 q0 + w1 q1 = 1/2, then clamp.
  const double a = q0, b = q1;
  const double lambda = (0.5 - w0 * a - w1 * b) / (w0 * w0 + w1 * w1);
  double c0 = std::clamp(a + lambda * w0, lo(0), hi(0));
  double c1 = std::clamp((0.5 - w0 * c0) / w1, lo(1), hi(1));
  c0 = std::clamp((0.5 - w1 * c1) / w0, lo(0), hi(0));
  if (std::abs(w0 * c0 + w1 * c1 - 0.5) > 1e-12) return {q0, q1};
  return {c0, c1};
}

}  // namespace detail

/// Draws `k` unordered pairs i < j with class balancing. The row label is
/// drawn 50/50 when both row classes exist; the column label is then drawn
/// with per-row-class shares that make the column classes 50/50 overall when
/// feasible. Pairs inside a (row, column) class are drawn without replacement
/// until exhausted. Diagonal entries are never sampled.
inline std::vector<SampledPair> sample_pairs(const AdjacencyMatrices& adj, std::size_t k,
                                             std::uint64_t seed) {
  if (k == 0) return {};
  const std::size_t n = adj.n();
  if (n < 2) throw Error(ErrorCode::kInsufficientCells, "need at least two cells to sample pairs");
  if (adj.col.size() != n) throw Error(ErrorCode::kDimensionMismatch, "row/column matrix sizes differ");

  detail::StratumPool pools[2][2];
  std::size_t counts[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const int r = adj.row.at(i, j) ? 1 : 0;
      const int c = adj.col.at(i, j) ? 1 : 0;
      pools[r][c].add(i, j);
      ++counts[r][c];
    }

  const std::size_t row_pos = counts[1][0] + counts[1][1];
  const std::size_t row_neg = counts[0][0] + counts[0][1];
  const double p_row1 = row_pos == 0 ? 0.0 : row_neg == 0 ? 1.0 : 0.5;
  const auto [q0, q1] = detail::column_shares(p_row1, counts);

  Pcg32 rng(seed);
  std::vector<SampledPair> out;
  out.reserve(k);
  for (std::size_t d = 0; d < k; ++d) {
    const int r = rng.uniform() < p_row1 ? 1 : 0;
    int c = rng.uniform() < (r == 1 ? q1 : q0) ? 1 : 0;
    if (pools[r][c].empty()) c = 1 - c;
    const auto [i, j] = pools[r][c].draw(rng);
    out.push_back({i, j, r == 1, c == 1});
  }
  return out;
}

}  // namespace tabstruct
