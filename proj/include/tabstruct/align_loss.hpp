// Alignment regulariser over cell boxes and the composed detector loss.
#pragma once

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "tabstruct/core.hpp"

namespace tabstruct {

/// Components in squared pixels. l1: shared start row (y1), l2: shared end
/// row (y2), l3: shared start column (x1), l4: shared end column (x2).
struct AlignmentLossBreakdown {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  double l4 = 0.0;
  double total = 0.0;
};

/// Partial derivatives of the total alignment loss for one cell.
struct BoxGradient {
  int id = 0;
  double dx1 = 0.0;
  double dy1 = 0.0;
  double dx2 = 0.0;
  double dy2 = 0.0;
};

namespace detail {

enum class Edge { kY1, kY2, kX1, kX2 };

inline int group_key(const SpanIndices& s, Edge e) {
  switch (e) {
    case Edge::kY1: return s.sr;
    case Edge::kY2: return s.er;
    case Edge::kX1: return s.sc;
    case Edge::kX2: return s.ec;
  }
  return 0;
}

inline double edge_value(const BBox& b, Edge e) {
  switch (e) {
    case Edge::kY1: return b.y1;
    case Edge::kY2: return b.y2;
    case Edge::kX1: return b.x1;
    case Edge::kX2: return b.x2;
  }
  return 0.0;
}

// Cell positions grouped by the span index that governs edge `e`.
inline std::map<int, std::vector<std::size_t>> edge_groups(const TableAnnotation& t, Edge e) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < t.cells.size(); ++i)
    groups[group_key(*t.cells[i].spans, e)].push_back(i);
  return groups;
}

// Sum of squared differences over unordered pairs of each group.
inline double edge_term(const TableAnnotation& t, Edge e) {
  double sum = 0.0;
  for (const auto& [key, members] : edge_groups(t, e)) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      const double va = edge_value(t.cells[members[a]].bbox, e);
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const double d = va - edge_value(t.cells[members[b]].bbox, e);
        sum += d * d;
      }
    }
  }
  return sum;
}

}  // namespace detail

/// Pairs are unordered and counted once; groups of one cell contribute 0.
inline AlignmentLossBreakdown alignment_loss(const TableAnnotation& t) {
  require_spans(t);
  using detail::Edge;
  AlignmentLossBreakdown out;
  out.l1 = detail::edge_term(t, Edge::kY1);
  out.l2 = detail::edge_term(t, Edge::kY2);
  out.l3 = detail::edge_term(t, Edge::kX1);
  out.l4 = detail::edge_term(t, Edge::kX2);
  out.total = out.l1 + out.l2 + out.l3 + out.l4;
  return out;
}

/// Analytic gradient of alignment_loss().total, one entry per cell in table
/// order: d/dv_c = 2 * sum over group peers d of (v_c - v_d).
inline std::vector<BoxGradient> alignment_loss_grad(const TableAnnotation& t) {
  require_spans(t);
  using detail::Edge;
  std::vector<BoxGradient> grad(t.cells.size());
  for (std::size_t i = 0; i < t.cells.size(); ++i) grad[i].id = t.cells[i].id;

  for (Edge e : {Edge::kY1, Edge::kY2, Edge::kX1, Edge::kX2}) {
    for (const auto& [key, members] : detail::edge_groups(t, e)) {
      for (std::size_t a : members) {
        const double va = detail::edge_value(t.cells[a].bbox, e);
        double g = 0.0;
        for (std::size_t b : members)
          if (b != a) g += va - detail::edge_value(t.cells[b].bbox, e);
        g *= 2.0;
        switch (e) {
          case Edge::kY1: grad[a].dy1 = g; break;
          case Edge::kY2: grad[a].dy2 = g; break;
          case Edge::kX1: grad[a].dx1 = g; break;
          case Edge::kX2: grad[a].dx2 = g; break;
        }
      }
    }
  }
  return grad;
}

/// Externally supplied detector/classifier losses plus the alignment term.
struct TotalLossInputs {
  double l_box = 0.0;
  double l_cls = 0.0;
  double l_mask = 0.0;
  double l_gnn = 0.0;
  double l_align = 0.0;
  double align_weight = 1.0;
};

inline double total_loss(const TotalLossInputs& in) {
  const std::array<std::pair<const char*, double>, 6> terms{{{"l_box", in.l_box},
                                                             {"l_cls", in.l_cls},
                                                             {"l_mask", in.l_mask},
                                                             {"l_gnn", in.l_gnn},
                                                             {"l_align", in.l_align},
                                                             {"align_weight", in.align_weight}}};
  for (const auto& [name, v] : terms) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, std::string(name) + " is not finite");
    if (v < 0.0) throw Error(ErrorCode::kNegativeValue, std::string(name) + " is negative");
  }
  return in.l_box + in.l_cls + in.l_mask + in.align_weight * in.l_align + in.l_gnn;
}

}  // namespace tabstruct
