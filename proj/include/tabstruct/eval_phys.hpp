// Physical structure evaluation: IoU matching of detected cells and
// neighbour-relation precision/recall/F1.
#pragma once

#include <algorithm>
#include <map>
#include <tuple>
#include <vector>

#include "tabstruct/core.hpp"

namespace tabstruct {

inline double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? std::min(1.0, inter / uni) : 0.0;
}

struct MatchedPair {
  int pred_id = 0;
  int gt_id = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;
  std::vector<int> unmatched_pred;
  std::vector<int> unmatched_gt;
  double threshold = 0.5;
};

/// Greedy one-to-one matching: candidate pairs with IoU >= threshold are
/// taken in descending IoU order, ties broken by (pred id, gt id).
inline MatchResult match_cells(const TableAnnotation& pred, const TableAnnotation& gt,
                               double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::kInvalidParams, "IoU threshold must lie in (0, 1]");

  std::vector<MatchedPair> candidates;
  for (const auto& p : pred.cells)
    for (const auto& g : gt.cells) {
      const double v = iou(p.bbox, g.bbox);
      if (v >= threshold) candidates.push_back({p.id, g.id, v});
    }
  std::sort(candidates.begin(), candidates.end(), [](const MatchedPair& a, const MatchedPair& b) {
    return std::tuple(-a.iou, a.pred_id, a.gt_id) < std::tuple(-b.iou, b.pred_id, b.gt_id);
  });

  MatchResult out;
  out.threshold = threshold;
  std::map<int, bool> pred_used, gt_used;
  for (const auto& c : candidates) {
    if (pred_used[c.pred_id] || gt_used[c.gt_id]) continue;
    pred_used[c.pred_id] = gt_used[c.gt_id] = true;
    out.pairs.push_back(c);
  }
  for (const auto& p : pred.cells)
    if (!pred_used[p.id]) out.unmatched_pred.push_back(p.id);
  for (const auto& g : gt.cells)
    if (!gt_used[g.id]) out.unmatched_gt.push_back(g.id);
  return out;
}

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  static PRF from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    PRF r;
    r.tp = tp;
    r.fp = fp;
    r.fn = fn;
    r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    r.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double s = r.precision + r.recall;
    r.f1 = s == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / s;
    return r;
  }
};

/// Micro-average: counts are pooled before the ratios are taken.
inline PRF aggregate(const std::vector<PRF>& per_table) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& r : per_table) {
    tp += r.tp;
    fp += r.fp;
    fn += r.fn;
  }
  return PRF::from_counts(tp, fp, fn);
}

enum class RelationMode {
  /// Nearest non-empty neighbour to the right / below, per spanned line.
  kNeighbours,
  /// Every ordered pair of non-empty cells sharing a row (left to right) or a
  /// column (top to bottom). Diagnostic only.
  kAllPairs,
};

/// Directed neighbour relations between non-empty cells. For each spanned
/// row r of a cell, the horizontal relation goes to the non-empty cell
/// covering row r with the smallest start column beyond the cell's end
/// column; vertical relations are the same per spanned column, downwards.
/// Relations touching an empty cell are never produced.
inline RelationSet generate_relations(const TableAnnotation& t,
                                      RelationMode mode = RelationMode::kNeighbours) {
  require_spans(t);
  std::vector<const CellBox*> filled;
  for (const auto& c : t.cells)
    if (!c.empty()) filled.push_back(&c);

  RelationSet out;
  for (const CellBox* c : filled) {
    const auto& s = *c->spans;
    if (mode == RelationMode::kAllPairs) {
      for (const CellBox* d : filled) {
        if (d == c) continue;
        const auto& o = *d->spans;
        if (s.sr <= o.er && o.sr <= s.er && o.sc > s.ec)
          out.insert({c->id, d->id, Direction::kHorizontal});
        if (s.sc <= o.ec && o.sc <= s.ec && o.sr > s.er)
          out.insert({c->id, d->id, Direction::kVertical});
      }
      continue;
    }
    for (int r = s.sr; r <= s.er; ++r) {
      const CellBox* best = nullptr;
      for (const CellBox* d : filled) {
        const auto& o = *d->spans;
        if (d == c || o.sr > r || o.er < r || o.sc <= s.ec) continue;
        if (!best || std::pair(o.sc, d->id) < std::pair(best->spans->sc, best->id)) best = d;
      }
      if (best) out.insert({c->id, best->id, Direction::kHorizontal});
    }
    for (int col = s.sc; col <= s.ec; ++col) {
      const CellBox* best = nullptr;
      for (const CellBox* d : filled) {
        const auto& o = *d->spans;
        if (d == c || o.sc > col || o.ec < col || o.sr <= s.er) continue;
        if (!best || std::pair(o.sr, d->id) < std::pair(best->spans->sr, best->id)) best = d;
      }
      if (best) out.insert({c->id, best->id, Direction::kVertical});
    }
  }
  return out;
}

namespace detail {

inline TableAnnotation non_empty_cells(const TableAnnotation& t) {
  TableAnnotation out;
  for (const auto& c : t.cells)
    if (!c.empty()) out.cells.push_back(c);
  return out;
}

}  // namespace detail

/// Relation-based structure score. Blank cells are removed from both sides
/// before matching; predicted relations are translated to ground-truth ids
/// through the IoU matching, and any relation touching an unmatched cell is a
/// false positive.
inline PRF relation_f1(const TableAnnotation& pred, const TableAnnotation& gt, double threshold,
                       RelationMode mode = RelationMode::kNeighbours) {
  require_spans(pred);
  require_spans(gt);
  const auto pred_filled = detail::non_empty_cells(pred);
  const auto gt_filled = detail::non_empty_cells(gt);
  const auto match = match_cells(pred_filled, gt_filled, threshold);
  std::map<int, int> to_gt;
  for (const auto& p : match.pairs) to_gt[p.pred_id] = p.gt_id;

  const RelationSet gt_rel = generate_relations(gt_filled, mode);
  const RelationSet pred_rel = generate_relations(pred_filled, mode);
  std::size_t tp = 0;
  for (const auto& r : pred_rel) {
    const auto a = to_gt.find(r.from_cell);
    const auto b = to_gt.find(r.to_cell);
    if (a == to_gt.end() || b == to_gt.end()) continue;
    if (gt_rel.count({a->second, b->second, r.direction})) ++tp;
  }
  return PRF::from_counts(tp, pred_rel.size() - tp, gt_rel.size() - tp);
}

/// Cell detection score: a matched pair is a true positive.
inline PRF cell_detection_prf(const TableAnnotation& pred, const TableAnnotation& gt,
                              double threshold) {
  const auto m = match_cells(pred, gt, threshold);
  return PRF::from_counts(m.pairs.size(), m.unmatched_pred.size(), m.unmatched_gt.size());
}

struct SweepRow {
  double threshold = 0.0;
  PRF cells;
  PRF relations;
};

/// Relation scores need spans on both tables; without them only cell
/// detection is filled in and `relations` stays zero.
inline std::vector<SweepRow> threshold_sweep(const TableAnnotation& pred, const TableAnnotation& gt,
                                             const std::vector<double>& thresholds,
                                             RelationMode mode = RelationMode::kNeighbours) {
  const bool spanned = pred.all_spanned() && gt.all_spanned();
  std::vector<SweepRow> out;
  for (double th : thresholds) {
    SweepRow row{th, cell_detection_prf(pred, gt, th), {}};
    if (spanned) row.relations = relation_f1(pred, gt, th, mode);
    out.push_back(row);
  }
  return out;
}

}  // namespace tabstruct
