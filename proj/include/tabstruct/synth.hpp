// Deterministic synthetic tables for property tests and oracle checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tabstruct/core.hpp"
#include "tabstruct/rng.hpp"

namespace tabstruct {

struct SynthParams {
  int rows = 1;
  int cols = 1;
  double merge_prob = 0.0;
  double empty_prob = 0.0;
  double jitter = 0.0;
};

/// Grid geometry of generated tables, in pixels.
inline constexpr double kSynthColumnWidth = 100.0;
inline constexpr double kSynthRowHeight = 40.0;
/// Edge noise is capped at this fraction of the row height. Below one half,
/// every box stays valid and sorting by y1 (x1) never crosses a grid line.
inline constexpr double kSynthMaxJitterFraction = 0.45;

namespace detail {

// Cell index covering each grid square, -1 when free.
class GridOwner {
 public:
  GridOwner(int rows, int cols) : rows_(rows), cols_(cols), owner_(static_cast<std::size_t>(rows * cols), -1) {}

  int& at(int r, int c) { return owner_[static_cast<std::size_t>(r * cols_ + c)]; }
  bool free_block(int r0, int r1, int c0, int c1) {
    if (r1 >= rows_ || c1 >= cols_) return false;
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c)
        if (at(r, c) != -1) return false;
    return true;
  }

 private:
  int rows_, cols_;
  std::vector<int> owner_;
};

// Every pair of neighbouring grid lines must be told apart by some cell that
// ends at the first or starts at the second; otherwise the adjacency graph
// cannot distinguish them. Offending boundaries are repaired by splitting the
// first crossing cell.
inline bool split_indistinct_boundary(std::vector<SpanIndices>& spans, bool rows, int lines) {
  for (int b = 0; b + 1 < lines; ++b) {
    bool witnessed = false;
    for (const auto& s : spans) {
      const int end = rows ? s.er : s.ec;
      const int start = rows ? s.sr : s.sc;
      if (end == b || start == b + 1) {
        witnessed = true;
        break;
      }
    }
    if (witnessed) continue;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      SpanIndices s = spans[i];
      const int start = rows ? s.sr : s.sc;
      const int end = rows ? s.er : s.ec;
      if (start <= b && end >= b + 1) {
        SpanIndices tail = s;
        if (rows) {
          spans[i].er = b;
          tail.sr = b + 1;
        } else {
          spans[i].ec = b;
          tail.sc = b + 1;
        }
        spans.insert(spans.begin() + static_cast<std::ptrdiff_t>(i) + 1, tail);
        return true;
      }
    }
  }
  return false;
}

}  // namespace detail

/// Generates a rows x cols table. Grid squares are visited in row-major
/// order; each free square opens a cell that grows right, then down, while a
/// merge coin (merge_prob) succeeds and the squares are free. Cells are empty
/// with probability empty_prob, otherwise hold the token "r<sr>c<sc>". Boxes
/// tile a 100x40 px grid and every edge is moved by uniform noise in
/// [-jitter, +jitter], jitter capped at 0.45 x 40 px. Cell ids follow the
/// row-major order of their top-left square.
///
/// Random draws happen in this order: merge coins during the grid sweep, then
/// per cell (in id order) the empty coin followed by x1, y1, x2, y2 noise.
inline TableAnnotation generate(std::uint64_t seed, const SynthParams& p) {
  if (p.rows < 1 || p.cols < 1) throw Error(ErrorCode::kInvalidParams, "rows and cols must be >= 1");
  if (!(p.merge_prob >= 0.0 && p.merge_prob < 1.0))
    throw Error(ErrorCode::kInvalidParams, "merge_prob must lie in [0, 1)");
  if (!(p.empty_prob >= 0.0 && p.empty_prob < 1.0))
    throw Error(ErrorCode::kInvalidParams, "empty_prob must lie in [0, 1)");
  if (!(p.jitter >= 0.0) || !std::isfinite(p.jitter))
    throw Error(ErrorCode::kInvalidParams, "jitter must be a non-negative finite number");

  Pcg32 rng(seed);
  detail::GridOwner owner(p.rows, p.cols);
  std::vector<SpanIndices> spans;
  for (int r = 0; r < p.rows; ++r) {
    for (int c = 0; c < p.cols; ++c) {
      if (owner.at(r, c) != -1) continue;
      SpanIndices s{r, r, c, c};
      while (rng.bernoulli(p.merge_prob) && owner.free_block(r, r, s.ec + 1, s.ec + 1)) ++s.ec;
      while (rng.bernoulli(p.merge_prob) && owner.free_block(s.er + 1, s.er + 1, s.sc, s.ec)) ++s.er;
      const int idx = static_cast<int>(spans.size());
      for (int rr = s.sr; rr <= s.er; ++rr)
        for (int cc = s.sc; cc <= s.ec; ++cc) owner.at(rr, cc) = idx;
      spans.push_back(s);
    }
  }
  while (detail::split_indistinct_boundary(spans, true, p.rows) ||
         detail::split_indistinct_boundary(spans, false, p.cols)) {
  }
  std::stable_sort(spans.begin(), spans.end(), [](const SpanIndices& a, const SpanIndices& b) {
    return std::pair(a.sr, a.sc) < std::pair(b.sr, b.sc);
  });

  const double jitter = std::min(p.jitter, kSynthMaxJitterFraction * kSynthRowHeight);
  TableAnnotation t;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    CellBox cell;
    cell.id = static_cast<int>(i);
    cell.spans = s;
    const bool empty = rng.bernoulli(p.empty_prob);
    cell.content = empty ? "" : "r" + std::to_string(s.sr) + "c" + std::to_string(s.sc);
    cell.bbox.x1 = s.sc * kSynthColumnWidth + rng.uniform(-jitter, jitter);
    cell.bbox.y1 = s.sr * kSynthRowHeight + rng.uniform(-jitter, jitter);
    cell.bbox.x2 = (s.ec + 1) * kSynthColumnWidth + rng.uniform(-jitter, jitter);
    cell.bbox.y2 = (s.er + 1) * kSynthRowHeight + rng.uniform(-jitter, jitter);
    t.cells.push_back(std::move(cell));
  }
  return t;
}

inline TableAnnotation generate(std::uint64_t seed, int rows, int cols, double merge_prob = 0.0,
                                double empty_prob = 0.0, double jitter = 0.0) {
  return generate(seed, SynthParams{rows, cols, merge_prob, empty_prob, jitter});
}

/// Simulated detector output. Each cell is dropped with probability
/// drop_prob; every surviving box edge moves by uniform noise within
/// shift x (box width for x edges, box height for y edges). Spans are
/// stripped; ids and content are kept. drop_prob is clamped to [0, 1] and
/// shift to [0, 0.49].
///
/// Per cell in table order: the drop coin, then x1, y1, x2, y2 noise for
/// survivors.
inline TableAnnotation corrupt(const TableAnnotation& t, std::uint64_t seed, double drop_prob,
                               double shift) {
  drop_prob = std::clamp(std::isfinite(drop_prob) ? drop_prob : 0.0, 0.0, 1.0);
  shift = std::clamp(std::isfinite(shift) ? shift : 0.0, 0.0, 0.49);
  Pcg32 rng(seed);
  TableAnnotation out;
  for (const auto& c : t.cells) {
    if (rng.bernoulli(drop_prob)) continue;
    CellBox cell = c;
    cell.spans.reset();
    const double w = c.bbox.width(), h = c.bbox.height();
    cell.bbox.x1 += rng.uniform(-shift, shift) * w;
    cell.bbox.y1 += rng.uniform(-shift, shift) * h;
    cell.bbox.x2 += rng.uniform(-shift, shift) * w;
    cell.bbox.y2 += rng.uniform(-shift, shift) * h;
    out.cells.push_back(std::move(cell));
  }
  return out;
}

}  // namespace tabstruct
