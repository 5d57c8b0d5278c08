// Logical structure metrics: markup token sequences, BLEU, and tree-edit
// similarity on row/cell structure trees.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "tabstruct/core.hpp"

namespace tabstruct {

using MarkupSeq = std::vector<std::string>;

inline const std::string kRowOpen = "<tr>";
inline const std::string kRowClose = "</tr>";

namespace detail {

inline std::string span_attributes(const SpanIndices& s) {
  std::string out;
  if (s.row_span() > 1) out += " rowspan=\"" + std::to_string(s.row_span()) + "\"";
  if (s.col_span() > 1) out += " colspan=\"" + std::to_string(s.col_span()) + "\"";
  return out;
}

// Cells grouped by start row, each group ordered by start column then id.
inline std::map<int, std::vector<const CellBox*>> cells_by_start_row(const TableAnnotation& t) {
  std::map<int, std::vector<const CellBox*>> rows;
  for (const auto& c : t.cells) rows[c.spans->sr].push_back(&c);
  for (auto& [r, cells] : rows)
    std::stable_sort(cells.begin(), cells.end(), [](const CellBox* a, const CellBox* b) {
      return std::pair(a->spans->sc, a->id) < std::pair(b->spans->sc, b->id);
    });
  return rows;
}

}  // namespace detail

/// Structure-only markup: `<tr>` ... `</tr>` for every row 0..max(er), one
/// `<td>` token per cell in its start row ordered by start column. Span
/// attributes appear only when greater than 1, e.g. `<td colspan="2">`.
inline MarkupSeq to_markup(const TableAnnotation& t) {
  require_spans(t);
  MarkupSeq out;
  if (t.cells.empty()) return out;
  int last_row = 0;
  for (const auto& c : t.cells) last_row = std::max(last_row, c.spans->er);
  const auto rows = detail::cells_by_start_row(t);
  for (int r = 0; r <= last_row; ++r) {
    out.push_back(kRowOpen);
    if (auto it = rows.find(r); it != rows.end())
      for (const CellBox* c : it->second) out.push_back("<td" + detail::span_attributes(*c->spans) + ">");
    out.push_back(kRowClose);
  }
  return out;
}

inline std::string join_markup(const MarkupSeq& seq) {
  std::string out;
  for (const auto& tok : seq) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

/// Sentence BLEU without smoothing. The n-gram order is capped at the
/// candidate length; brevity penalty exp(1 - r/c) applies when c < r.
inline double bleu(const MarkupSeq& candidate, const MarkupSeq& reference, int max_n = 4) {
  if (reference.empty()) throw Error(ErrorCode::kEmptyReference, "reference sequence is empty");
  if (max_n < 1) throw Error(ErrorCode::kInvalidParams, "max_n must be at least 1");
  if (candidate.empty()) return 0.0;

  const auto c_len = candidate.size();
  const auto r_len = reference.size();
  const int order = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_n), c_len));

  auto ngrams = [](const MarkupSeq& s, int n) {
    std::map<std::vector<std::string>, std::size_t> counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= s.size(); ++i)
      ++counts[std::vector<std::string>(s.begin() + static_cast<std::ptrdiff_t>(i),
                                        s.begin() + static_cast<std::ptrdiff_t>(i) + n)];
    return counts;
  };

  double log_sum = 0.0;
  for (int n = 1; n <= order; ++n) {
    const auto cand = ngrams(candidate, n);
    const auto ref = ngrams(reference, n);
    std::size_t clipped = 0;
    for (const auto& [gram, count] : cand) {
      auto it = ref.find(gram);
      if (it != ref.end()) clipped += std::min(count, it->second);
    }
    if (clipped == 0) return 0.0;
    const auto total = c_len - static_cast<std::size_t>(n) + 1;
    log_sum += std::log(static_cast<double>(clipped) / static_cast<double>(total));
  }
  const double bp =
      c_len < r_len ? std::exp(1.0 - static_cast<double>(r_len) / static_cast<double>(c_len)) : 1.0;
  return bp * std::exp(log_sum / order);
}

/// Rooted ordered labelled tree.
struct TreeNode {
  std::string label;
  std::vector<TreeNode> children;

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& c : children) n += c.size();
    return n;
  }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

using StructTree = TreeNode;

/// root `table` -> one `tr` node per row 0..max(er) -> `td` nodes attached
/// at their start row in start-column order. Cell labels carry span
/// attributes and, when requested, the content after a `|` separator.
inline StructTree table_to_tree(const TableAnnotation& t, bool include_content = false) {
  require_spans(t);
  StructTree root{"table", {}};
  if (t.cells.empty()) return root;
  int last_row = 0;
  for (const auto& c : t.cells) last_row = std::max(last_row, c.spans->er);
  const auto rows = detail::cells_by_start_row(t);
  for (int r = 0; r <= last_row; ++r) {
    TreeNode row{"tr", {}};
    if (auto it = rows.find(r); it != rows.end())
      for (const CellBox* c : it->second) {
        std::string label = "td" + detail::span_attributes(*c->spans);
        if (include_content) label += "|" + c->content;
        row.children.push_back({std::move(label), {}});
      }
    root.children.push_back(std::move(row));
  }
  return root;
}

namespace detail {

// Postorder view of a tree for the Zhang-Shasha recurrence. Arrays are
// 1-based; index 0 is unused.
struct PostorderTree {
  std::vector<const std::string*> label{nullptr};
  std::vector<std::size_t> leftmost{0};
  std::vector<std::size_t> keyroots;

  explicit PostorderTree(const TreeNode& root) {
    visit(root);
    const std::size_t n = label.size() - 1;
    std::map<std::size_t, std::size_t> highest;
    for (std::size_t k = 1; k <= n; ++k) highest[leftmost[k]] = k;
    for (const auto& [l, k] : highest) keyroots.push_back(k);
    std::sort(keyroots.begin(), keyroots.end());
  }

  std::size_t size() const { return label.size() - 1; }

 private:
  std::size_t visit(const TreeNode& node) {
    std::size_t first_leaf = 0;
    for (const auto& c : node.children) {
      const std::size_t l = visit(c);
      if (first_leaf == 0) first_leaf = l;
    }
    label.push_back(&node.label);
    const std::size_t me = label.size() - 1;
    leftmost.push_back(first_leaf == 0 ? me : first_leaf);
    return leftmost.back();
  }
};

}  // namespace detail

/// Ordered tree edit distance with unit insert/delete cost and substitution
/// cost 0 for equal labels, 1 otherwise (Zhang-Shasha keyroot decomposition).
inline std::size_t tree_edit_distance(const TreeNode& a, const TreeNode& b) {
  const detail::PostorderTree ta(a), tb(b);
  const std::size_t na = ta.size(), nb = tb.size();
  std::vector<std::vector<std::size_t>> td(na + 1, std::vector<std::size_t>(nb + 1, 0));
  std::vector<std::vector<std::size_t>> fd(na + 2, std::vector<std::size_t>(nb + 2, 0));

  for (std::size_t i : ta.keyroots) {
    for (std::size_t j : tb.keyroots) {
      const std::size_t li = ta.leftmost[i], lj = tb.leftmost[j];
      // fd[x][y] covers forests l(i)..x-1+l(i) and l(j)..y-1+l(j) with offsets.
      const std::size_t rows = i - li + 2, cols = j - lj + 2;
      fd[0][0] = 0;
      for (std::size_t x = 1; x < rows; ++x) fd[x][0] = fd[x - 1][0] + 1;
      for (std::size_t y = 1; y < cols; ++y) fd[0][y] = fd[0][y - 1] + 1;
      for (std::size_t x = 1; x < rows; ++x) {
        const std::size_t u = li + x - 1;
        for (std::size_t y = 1; y < cols; ++y) {
          const std::size_t v = lj + y - 1;
          const std::size_t del = fd[x - 1][y] + 1;
          const std::size_t ins = fd[x][y - 1] + 1;
          if (ta.leftmost[u] == li && tb.leftmost[v] == lj) {
            const std::size_t sub = fd[x - 1][y - 1] + (*ta.label[u] == *tb.label[v] ? 0 : 1);
            fd[x][y] = std::min({del, ins, sub});
            td[u][v] = fd[x][y];
          } else {
            const std::size_t px = ta.leftmost[u] - li;
            const std::size_t py = tb.leftmost[v] - lj;
            fd[x][y] = std::min({del, ins, fd[px][py] + td[u][v]});
          }
        }
      }
    }
  }
  return td[na][nb];
}

/// 1 - TED(a, b) / max(|a|, |b|).
inline double teds(const StructTree& a, const StructTree& b) {
  const std::size_t sa = a.size(), sb = b.size();
  const double d = static_cast<double>(tree_edit_distance(a, b));
  return 1.0 - d / static_cast<double>(std::max(sa, sb));
}

/// Document-level average of per-table scores; 0 for an empty corpus.
inline double document_mean(const std::vector<double>& scores) {
  if (scores.empty()) return 0.0;
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

}  // namespace tabstruct
