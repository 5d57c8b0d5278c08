// Table serialisation: the canonical cell JSON file and the XML structure
// output (cells with span attributes, bounding box and content).
#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "json.hpp"
#include "tabstruct/core.hpp"

namespace tabstruct {

inline constexpr const char* kJsonVersion = "tabstruct-table/1";

/// Shortest decimal that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open '" + path + "' for writing");
  out << text;
  if (!out.flush()) throw Error(ErrorCode::kIoFailure, "failed writing '" + path + "'");
}

// --- canonical JSON -------------------------------------------------------

struct CanonicalTableFile {
  TableAnnotation table;
  std::optional<AdjacencyMatrices> adjacency;

  friend bool operator==(const CanonicalTableFile&, const CanonicalTableFile&) = default;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw Error(ErrorCode::kParseError, where + ": unknown field '" + key + "'");
}

template <typename T>
T json_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw Error(ErrorCode::kParseError, where + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw Error(ErrorCode::kParseError, where + ": '" + key + "' must be a string");
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw Error(ErrorCode::kParseError, where + ": '" + key + "' must be a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer())
      throw Error(ErrorCode::kParseError, where + ": '" + key + "' must be an integer");
  } else {
    if (!v.is_number()) throw Error(ErrorCode::kParseError, where + ": '" + key + "' must be a number");
  }
  return v.get<T>();
}

inline BinaryMatrix json_matrix(const nlohmann::json& v, const char* key) {
  if (!v.is_array()) throw Error(ErrorCode::kParseError, std::string(key) + " must be an array of arrays");
  std::vector<std::vector<int>> rows;
  for (const auto& row : v) {
    if (!row.is_array()) throw Error(ErrorCode::kParseError, std::string(key) + " must be an array of arrays");
    std::vector<int> r;
    for (const auto& e : row) {
      if (!e.is_number_integer() || (e.get<int>() != 0 && e.get<int>() != 1))
        throw Error(ErrorCode::kParseError, std::string(key) + " entries must be 0 or 1");
      r.push_back(e.get<int>());
    }
    rows.push_back(std::move(r));
  }
  return BinaryMatrix::from_nested(rows);
}

}  // namespace detail

inline CanonicalTableFile parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "top level must be an object");
  detail::reject_unknown(doc, {"version", "cells", "row_adjacency", "col_adjacency"}, "table");
  const auto version = detail::json_field<std::string>(doc, "version", "table");
  if (version != kJsonVersion)
    throw Error(ErrorCode::kParseError, "unsupported version '" + version + "', expected '" + kJsonVersion + "'");
  if (!doc.contains("cells") || !doc.at("cells").is_array())
    throw Error(ErrorCode::kParseError, "table: 'cells' must be an array");

  CanonicalTableFile file;
  std::size_t index = 0;
  for (const auto& jc : doc.at("cells")) {
    const std::string where = "cells[" + std::to_string(index++) + "]";
    if (!jc.is_object()) throw Error(ErrorCode::kParseError, where + " must be an object");
    detail::reject_unknown(jc, {"id", "x1", "y1", "x2", "y2", "content", "empty", "sr", "er", "sc", "ec"}, where);
    CellBox c;
    c.id = detail::json_field<int>(jc, "id", where);
    c.bbox = {detail::json_field<double>(jc, "x1", where), detail::json_field<double>(jc, "y1", where),
              detail::json_field<double>(jc, "x2", where), detail::json_field<double>(jc, "y2", where)};
    c.content = jc.contains("content") ? detail::json_field<std::string>(jc, "content", where) : "";
    if (jc.contains("empty") && detail::json_field<bool>(jc, "empty", where) != c.empty())
      throw Error(ErrorCode::kInvariantViolation, where + ": 'empty' disagrees with content");
    const int span_fields = static_cast<int>(jc.contains("sr")) + jc.contains("er") + jc.contains("sc") + jc.contains("ec");
    if (span_fields == 4) {
      c.spans = SpanIndices{detail::json_field<int>(jc, "sr", where), detail::json_field<int>(jc, "er", where),
                            detail::json_field<int>(jc, "sc", where), detail::json_field<int>(jc, "ec", where)};
    } else if (span_fields != 0) {
      throw Error(ErrorCode::kParseError, where + ": span fields sr/er/sc/ec must appear together");
    }
    file.table.cells.push_back(std::move(c));
  }

  const bool has_row = doc.contains("row_adjacency"), has_col = doc.contains("col_adjacency");
  if (has_row != has_col)
    throw Error(ErrorCode::kParseError, "row_adjacency and col_adjacency must appear together");
  if (has_row) {
    AdjacencyMatrices adj{detail::json_matrix(doc.at("row_adjacency"), "row_adjacency"),
                          detail::json_matrix(doc.at("col_adjacency"), "col_adjacency")};
    const auto n = file.table.n_cells();
    if (adj.row.size() != n || adj.col.size() != n)
      throw Error(ErrorCode::kDimensionMismatch, "adjacency dimension does not match cell count " + std::to_string(n));
    file.adjacency = std::move(adj);
  }

  const auto violations = validate_table(file.table);
  if (!violations.empty()) throw Error(ErrorCode::kInvariantViolation, violations.front().to_string());
  return file;
}

inline std::string to_json(const CanonicalTableFile& file) {
  nlohmann::json doc;
  doc["version"] = kJsonVersion;
  doc["cells"] = nlohmann::json::array();
  for (const auto& c : file.table.cells) {
    nlohmann::json jc;
    jc["id"] = c.id;
    jc["x1"] = c.bbox.x1;
    jc["y1"] = c.bbox.y1;
    jc["x2"] = c.bbox.x2;
    jc["y2"] = c.bbox.y2;
    jc["content"] = c.content;
    jc["empty"] = c.empty();
    if (c.spans) {
      jc["sr"] = c.spans->sr;
      jc["er"] = c.spans->er;
      jc["sc"] = c.spans->sc;
      jc["ec"] = c.spans->ec;
    }
    doc["cells"].push_back(std::move(jc));
  }
  if (file.adjacency) {
    doc["row_adjacency"] = file.adjacency->row.to_nested();
    doc["col_adjacency"] = file.adjacency->col.to_nested();
  }
  return doc.dump(2) + "\n";
}

inline CanonicalTableFile read_json(const std::string& path) { return parse_json(read_text_file(path)); }

inline void write_json(const CanonicalTableFile& file, const std::string& path) {
  write_text_file(path, to_json(file));
}

// --- XML ------------------------------------------------------------------

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

/// Serialises a spanned table. Layout (two-space indent, LF line ends):
///
///   <?xml version="1.0" encoding="UTF-8"?>
///   <table>
///     <cell id="0" start-row="0" end-row="0" start-col="0" end-col="0">
///       <bounding-box x1="1" y1="2" x2="3" y2="4"/>
///       <content>a</content>
///     </cell>
///   </table>
///
/// Cells are ordered by (start-row, start-col, y1, x1, id); coordinates use
/// the shortest round-trippable decimal form.
inline std::string to_xml(const TableAnnotation& t) {
  require_spans(t);
  std::vector<const CellBox*> order;
  for (const auto& c : t.cells) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(), [](const CellBox* a, const CellBox* b) {
    return std::tuple(a->spans->sr, a->spans->sc, a->bbox.y1, a->bbox.x1, a->id) <
           std::tuple(b->spans->sr, b->spans->sc, b->bbox.y1, b->bbox.x1, b->id);
  });
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<table>\n";
  for (const CellBox* c : order) {
    const auto& s = *c->spans;
    out += "  <cell id=\"" + std::to_string(c->id) + "\" start-row=\"" + std::to_string(s.sr) +
           "\" end-row=\"" + std::to_string(s.er) + "\" start-col=\"" + std::to_string(s.sc) +
           "\" end-col=\"" + std::to_string(s.ec) + "\">\n";
    out += "    <bounding-box x1=\"" + format_number(c->bbox.x1) + "\" y1=\"" + format_number(c->bbox.y1) +
           "\" x2=\"" + format_number(c->bbox.x2) + "\" y2=\"" + format_number(c->bbox.y2) + "\"/>\n";
    out += "    <content>" + detail::xml_escape(c->content) + "</content>\n";
    out += "  </cell>\n";
  }
  out += "</table>\n";
  return out;
}

inline void write_xml(const TableAnnotation& t, const std::string& path) { write_text_file(path, to_xml(t)); }

namespace detail {

namespace pt = boost::property_tree;

inline std::optional<std::string> xml_attr(const pt::ptree& node, const char* name) {
  if (auto attrs = node.get_child_optional("<xmlattr>"))
    if (auto v = attrs->get_optional<std::string>(name)) return *v;
  return std::nullopt;
}

template <typename T>
T parse_attr_number(const std::string& text, const std::string& where, const char* name) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw Error(ErrorCode::kParseError, where + ": attribute '" + name + "' is not a valid number: '" + text + "'");
  return value;
}

template <typename T>
T required_attr(const pt::ptree& node, const char* name, const std::string& where) {
  auto v = xml_attr(node, name);
  if (!v) throw Error(ErrorCode::kParseError, where + ": missing attribute '" + name + "'");
  return parse_attr_number<T>(*v, where, name);
}

inline void collect_cells(const pt::ptree& node, std::vector<const pt::ptree*>& out) {
  for (const auto& [tag, child] : node) {
    if (tag == "cell")
      out.push_back(&child);
    else if (tag == "region" || tag == "table")
      collect_cells(child, out);
  }
}

}  // namespace detail

/// Parses the XML structure format. Also accepts ICDAR-2013-style files
/// (`<document><table><region><cell ...>`), where `end-row`/`end-col` default
/// to the start index and a missing `id` defaults to the document position.
inline TableAnnotation parse_xml(const std::string& text, const std::string& source = "<xml>") {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  try {
    std::istringstream in(text);
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::kParseError, source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  const pt::ptree* table = nullptr;
  if (auto t = doc.get_child_optional("table"))
    table = &*t;
  else if (auto d = doc.get_child_optional("document.table"))
    table = &*d;
  if (!table) throw Error(ErrorCode::kParseError, source + ": no <table> element");

  std::vector<const pt::ptree*> nodes;
  detail::collect_cells(*table, nodes);
  TableAnnotation out;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& node = *nodes[k];
    const auto id_text = detail::xml_attr(node, "id");
    std::string where = source + ": <cell> #" + std::to_string(k);
    const int id = id_text ? detail::parse_attr_number<int>(*id_text, where, "id") : static_cast<int>(k);
    where += " (id " + std::to_string(id) + ")";

    CellBox c;
    c.id = id;
    SpanIndices s;
    s.sr = detail::required_attr<int>(node, "start-row", where);
    s.sc = detail::required_attr<int>(node, "start-col", where);
    s.er = detail::xml_attr(node, "end-row") ? detail::required_attr<int>(node, "end-row", where) : s.sr;
    s.ec = detail::xml_attr(node, "end-col") ? detail::required_attr<int>(node, "end-col", where) : s.sc;
    c.spans = s;

    const auto box = node.get_child_optional("bounding-box");
    if (!box) throw Error(ErrorCode::kParseError, where + ": missing <bounding-box>");
    c.bbox = {detail::required_attr<double>(*box, "x1", where + " <bounding-box>"),
              detail::required_attr<double>(*box, "y1", where + " <bounding-box>"),
              detail::required_attr<double>(*box, "x2", where + " <bounding-box>"),
              detail::required_attr<double>(*box, "y2", where + " <bounding-box>")};
    if (auto content = node.get_child_optional("content")) {
      for (const auto& [tag, child] : *content)
        if (tag != "<xmlattr>" && tag != "<xmlcomment>")
          throw Error(ErrorCode::kParseError, where + ": <content> must hold text only, found <" + tag + ">");
      c.content = content->data();
    }
    out.cells.push_back(std::move(c));
  }

  const auto violations = validate_table(out);
  if (!violations.empty())
    throw Error(ErrorCode::kInvariantViolation, source + ": " + violations.front().to_string());
  return out;
}

inline TableAnnotation read_xml(const std::string& path) { return parse_xml(read_text_file(path), path); }

/// Reads either format, chosen by the `.xml` extension.
inline CanonicalTableFile read_table_file(const std::string& path) {
  const bool xml = path.size() >= 4 && path.compare(path.size() - 4, 4, ".xml") == 0;
  if (xml) return {read_xml(path), std::nullopt};
  return read_json(path);
}

}  // namespace tabstruct
