// Shared domain types for table structure recognition: boxes, spans, cells,
// tables, adjacency matrices and evaluation relations.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <vector>

namespace tabstruct {

enum class ErrorCode {
  kMissingSpans,
  kInvalidTable,
  kEmptyInput,
  kNonFinite,
  kNegativeValue,
  kDimensionMismatch,
  kNonSymmetric,
  kInsufficientCells,
  kEmptyReference,
  kEmptyTree,
  kInvalidParams,
  kIoFailure,
  kParseError,
  kInvariantViolation,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingSpans: return "MissingSpans";
    case ErrorCode::kInvalidTable: return "InvalidTable";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kNegativeValue: return "NegativeValue";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonSymmetric: return "NonSymmetric";
    case ErrorCode::kInsufficientCells: return "InsufficientCells";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kEmptyTree: return "EmptyTree";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Axis-aligned rectangle in image coordinates (y grows downward).
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }

  bool finite() const {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2);
  }
  bool valid() const { return finite() && x1 < x2 && y1 < y2; }

  bool contains(const BBox& o) const {
    return x1 <= o.x1 && y1 <= o.y1 && x2 >= o.x2 && y2 >= o.y2;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Logical grid placement: start/end row and start/end column, inclusive.
struct SpanIndices {
  int sr = 0;
  int er = 0;
  int sc = 0;
  int ec = 0;

  int row_span() const { return er - sr + 1; }
  int col_span() const { return ec - sc + 1; }
  bool valid() const { return sr >= 0 && sc >= 0 && sr <= er && sc <= ec; }

  bool overlaps(const SpanIndices& o) const {
    return sr <= o.er && o.sr <= er && sc <= o.ec && o.sc <= ec;
  }

  friend bool operator==(const SpanIndices&, const SpanIndices&) = default;
};

inline bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

/// A table cell. Emptiness is derived from the content.
struct CellBox {
  int id = 0;
  BBox bbox;
  std::optional<SpanIndices> spans;
  std::string content;

  bool empty() const { return is_blank(content); }

  friend bool operator==(const CellBox&, const CellBox&) = default;
};

struct TableAnnotation {
  std::vector<CellBox> cells;

  std::size_t n_cells() const { return cells.size(); }

  bool all_spanned() const {
    return std::all_of(cells.begin(), cells.end(),
                       [](const CellBox& c) { return c.spans.has_value(); });
  }

  const CellBox* find(int id) const {
    for (const auto& c : cells)
      if (c.id == id) return &c;
    return nullptr;
  }

  friend bool operator==(const TableAnnotation&, const TableAnnotation&) = default;
};

/// Throws MissingSpans unless every cell carries SpanIndices.
inline void require_spans(const TableAnnotation& t) {
  for (const auto& c : t.cells)
    if (!c.spans)
      throw Error(ErrorCode::kMissingSpans, "cell " + std::to_string(c.id) + " has no spans");
}

/// Square 0/1 matrix stored row-major.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  explicit BinaryMatrix(std::size_t n, std::uint8_t fill = 0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }

  std::uint8_t operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  bool at(std::size_t i, std::size_t j) const { return data_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v) { data_[i * n_ + j] = v ? 1 : 0; }
  void set_symmetric(std::size_t i, std::size_t j, bool v) {
    set(i, j, v);
    set(j, i, v);
  }

  bool symmetric() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (data_[i * n_ + j] != data_[j * n_ + i]) return false;
    return true;
  }

  std::vector<std::vector<int>> to_nested() const {
    std::vector<std::vector<int>> out(n_, std::vector<int>(n_));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out[i][j] = data_[i * n_ + j];
    return out;
  }

  static BinaryMatrix from_nested(const std::vector<std::vector<int>>& rows) {
    BinaryMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size())
        throw Error(ErrorCode::kDimensionMismatch,
                    "row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                        " entries, expected " + std::to_string(rows.size()));
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[i][j] != 0 && rows[i][j] != 1)
          throw Error(ErrorCode::kInvariantViolation, "adjacency entries must be 0 or 1");
        m.set(i, j, rows[i][j] == 1);
      }
    }
    return m;
  }

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Row/column association matrices indexed by cell position in the table.
/// The diagonal is 1 on output from this library; every consumer ignores it.
struct AdjacencyMatrices {
  BinaryMatrix row;
  BinaryMatrix col;

  std::size_t n() const { return row.size(); }

  friend bool operator==(const AdjacencyMatrices&, const AdjacencyMatrices&) = default;
};

enum class Direction { kHorizontal, kVertical };

struct Relation {
  int from_cell = 0;
  int to_cell = 0;
  Direction direction = Direction::kHorizontal;

  friend auto operator<=>(const Relation&, const Relation&) = default;
};

using RelationSet = std::set<Relation>;

struct Violation {
  std::optional<int> cell_id;
  std::string message;

  std::string to_string() const {
    return cell_id ? "cell " + std::to_string(*cell_id) + ": " + message : message;
  }
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks every structural invariant of a table. An empty result means the
/// table is valid.
inline std::vector<Violation> validate_table(const TableAnnotation& t) {
  std::vector<Violation> out;
  std::unordered_set<int> seen;
  for (const auto& c : t.cells) {
    if (!seen.insert(c.id).second) out.push_back({c.id, "duplicate cell id"});
    if (!c.bbox.finite())
      out.push_back({c.id, "bounding box has non-finite coordinates"});
    else if (!(c.bbox.x1 < c.bbox.x2) || !(c.bbox.y1 < c.bbox.y2))
      out.push_back({c.id, "bounding box has non-positive area"});
    if (c.spans && !c.spans->valid())
      out.push_back({c.id, "span indices must satisfy 0 <= sr <= er and 0 <= sc <= ec"});
  }
  if (t.all_spanned()) {
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
      const auto& a = t.cells[i];
      if (!a.spans->valid()) continue;
      for (std::size_t j = i + 1; j < t.cells.size(); ++j) {
        const auto& b = t.cells[j];
        if (b.spans->valid() && a.spans->overlaps(*b.spans))
          out.push_back({a.id, "span rectangle overlaps cell " + std::to_string(b.id)});
      }
    }
  }
  return out;
}

/// Throws InvalidTable with the first violation when validation fails.
inline void require_valid(const TableAnnotation& t) {
  auto v = validate_table(t);
  if (!v.empty()) throw Error(ErrorCode::kInvalidTable, v.front().to_string());
}

}  // namespace tabstruct
