// Ground-truth preparation: content-level boxes to aligned cell-level boxes.
#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tabstruct/core.hpp"

namespace tabstruct {

/// Expands every cell box so that cells sharing a start row share y1, cells
/// sharing an end row share y2, and likewise x1/x2 per start/end column.
/// Start edges snap to the group minimum and end edges to the group maximum,
/// so the result only grows boxes and has zero alignment loss.
inline TableAnnotation unify_boxes(const TableAnnotation& t) {
  require_spans(t);
  require_valid(t);

  std::map<int, double> top, bottom, left, right;
  for (const auto& c : t.cells) {
    const auto& s = *c.spans;
    auto lower = [](std::map<int, double>& m, int k, double v) {
      auto [it, fresh] = m.try_emplace(k, v);
      if (!fresh) it->second = std::min(it->second, v);
    };
    auto raise = [](std::map<int, double>& m, int k, double v) {
      auto [it, fresh] = m.try_emplace(k, v);
      if (!fresh) it->second = std::max(it->second, v);
    };
    lower(top, s.sr, c.bbox.y1);
    raise(bottom, s.er, c.bbox.y2);
    lower(left, s.sc, c.bbox.x1);
    raise(right, s.ec, c.bbox.x2);
  }

  TableAnnotation out = t;
  for (auto& c : out.cells) {
    const auto& s = *c.spans;
    c.bbox = {left.at(s.sc), top.at(s.sr), right.at(s.ec), bottom.at(s.er)};
  }
  return out;
}

struct Word {
  BBox bbox;
  std::string text;
};

namespace detail {

// Reading order: words are grouped into lines (a word joins the current line
// when its vertical centre falls inside the line's extent), lines go top to
// bottom and words inside a line left to right.
inline std::string join_reading_order(std::vector<const Word*> words) {
  std::stable_sort(words.begin(), words.end(), [](const Word* a, const Word* b) {
    return std::pair(a->bbox.y1, a->bbox.x1) < std::pair(b->bbox.y1, b->bbox.x1);
  });
  std::vector<std::vector<const Word*>> lines;
  double line_top = 0.0, line_bottom = 0.0;
  for (const Word* w : words) {
    const double centre = 0.5 * (w->bbox.y1 + w->bbox.y2);
    if (lines.empty() || centre < line_top || centre > line_bottom) {
      lines.push_back({w});
      line_top = w->bbox.y1;
      line_bottom = w->bbox.y2;
    } else {
      lines.back().push_back(w);
      line_bottom = std::max(line_bottom, w->bbox.y2);
    }
  }
  std::string out;
  for (auto& line : lines) {
    std::stable_sort(line.begin(), line.end(),
                     [](const Word* a, const Word* b) { return a->bbox.x1 < b->bbox.x1; });
    for (const Word* w : line) {
      if (w->text.empty()) continue;
      if (!out.empty()) out += ' ';
      out += w->text;
    }
  }
  return out;
}

}  // namespace detail

/// Builds content-level cells from word boxes. `cell_of_word[i]` is the cell
/// id of word i. Cells are returned in ascending id order; ids without words
/// produce no cell.
inline TableAnnotation words_to_cells(const std::vector<Word>& words,
                                      const std::vector<int>& cell_of_word) {
  if (words.empty()) throw Error(ErrorCode::kEmptyInput, "no words");
  if (cell_of_word.size() != words.size())
    throw Error(ErrorCode::kDimensionMismatch,
                "cell assignment has " + std::to_string(cell_of_word.size()) + " entries for " +
                    std::to_string(words.size()) + " words");

  std::map<int, std::vector<const Word*>> groups;
  for (std::size_t i = 0; i < words.size(); ++i) groups[cell_of_word[i]].push_back(&words[i]);

  TableAnnotation out;
  for (const auto& [id, members] : groups) {
    BBox box = members.front()->bbox;
    for (const Word* w : members) {
      box.x1 = std::min(box.x1, w->bbox.x1);
      box.y1 = std::min(box.y1, w->bbox.y1);
      box.x2 = std::max(box.x2, w->bbox.x2);
      box.y2 = std::max(box.y2, w->bbox.y2);
    }
    out.cells.push_back({id, box, std::nullopt, detail::join_reading_order(members)});
  }
  return out;
}

}  // namespace tabstruct
