#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "tabstruct/io.hpp"
#include "tabstruct/structure.hpp"
#include "tabstruct/synth.hpp"

using namespace tabstruct;

namespace {

TableAnnotation sorted_by_id(TableAnnotation t) {
  std::sort(t.cells.begin(), t.cells.end(), [](const CellBox& a, const CellBox& b) { return a.id < b.id; });
  return t;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::kInvariantViolation;
}

TableAnnotation single_cell(std::string content) {
  return {{CellBox{0, {1, 2, 3, 4}, SpanIndices{0, 0, 0, 0}, std::move(content)}}};
}

std::string cells_json(const std::string& cells, const std::string& extra = "") {
  return R"({"version": "tabstruct-table/1", "cells": [)" + cells + "]" + extra + "}";
}

}  // namespace

TEST(Xml, GoldenSingleCell) {
  const auto golden = read_text_file(std::string(TABSTRUCT_GOLDEN_DIR) + "/single_cell.xml");
  EXPECT_EQ(to_xml(single_cell("a")), golden);
  EXPECT_EQ(parse_xml(golden), single_cell("a"));
}

TEST(Xml, EmptyContent) {
  const auto xml = to_xml(single_cell(""));
  EXPECT_NE(xml.find("<content></content>"), std::string::npos);
  const auto back = parse_xml(xml);
  EXPECT_EQ(back.cells[0].content, "");
  EXPECT_TRUE(back.cells[0].empty());
}

TEST(Xml, EscapingAndWhitespaceSurvive) {
  for (const std::string content : {"a < b & c > d", "  padded  ", "two\nlines", "cr\r\nlf", "\"quoted\" 'x'"}) {
    const auto back = parse_xml(to_xml(single_cell(content)));
    EXPECT_EQ(back.cells[0].content, content);
  }
}

TEST(Xml, RoundtripOnGeneratedTables) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto t = generate(seed, 1 + seed % 9, 1 + (seed / 9) % 9, 0.3, 0.3, 13.7);
    const auto xml = to_xml(t);
    const auto back = parse_xml(xml);
    EXPECT_EQ(sorted_by_id(back), t) << seed;
    EXPECT_EQ(to_xml(back), xml) << seed;
  }
}

TEST(Xml, CellOrderIsGridOrder) {
  TableAnnotation t{{CellBox{5, {0, 40, 10, 50}, SpanIndices{1, 1, 0, 0}, "b"},
                     CellBox{9, {0, 0, 10, 10}, SpanIndices{0, 0, 0, 0}, "a"}}};
  const auto back = parse_xml(to_xml(t));
  EXPECT_EQ(back.cells[0].id, 9);
  EXPECT_EQ(back.cells[1].id, 5);
}

TEST(Xml, RequiresSpans) {
  TableAnnotation t{{CellBox{0, {1, 2, 3, 4}, std::nullopt, "a"}}};
  EXPECT_EQ(code_of([&] { to_xml(t); }), ErrorCode::kMissingSpans);
}

TEST(Xml, ParseErrors) {
  EXPECT_EQ(code_of([] { parse_xml("<table><cell"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_xml("<other/>"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] {
              parse_xml(R"(<table><cell id="0" start-row="x" start-col="0"><bounding-box x1="0" y1="0" x2="1" y2="1"/></cell></table>)");
            }),
            ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_xml(R"(<table><cell id="0" start-row="0" start-col="0"/></table>)"); }),
            ErrorCode::kParseError);
  try {
    parse_xml("<table>\n<cell>\n</table>", "f.xml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("f.xml:"), std::string::npos);
  }
}

TEST(Xml, RejectsInvalidTables) {
  const std::string overlapping = R"(<table>
<cell id="0" start-row="0" end-row="0" start-col="0" end-col="1"><bounding-box x1="0" y1="0" x2="2" y2="1"/></cell>
<cell id="1" start-row="0" end-row="0" start-col="1" end-col="1"><bounding-box x1="1" y1="0" x2="2" y2="1"/></cell>
</table>)";
  EXPECT_EQ(code_of([&] { parse_xml(overlapping); }), ErrorCode::kInvariantViolation);
}

TEST(Xml, AcceptsIcdarLayout) {
  const std::string doc = R"(<?xml version="1.0" encoding="UTF-8"?>
<document filename="x.pdf">
  <table id="1">
    <region id="1" page="1">
      <cell id="0" start-col="0" start-row="0" end-col="1"><bounding-box x1="10" y1="20" x2="50" y2="30"/><content>Head</content></cell>
      <cell id="1" start-col="0" start-row="1"><bounding-box x1="10" y1="35" x2="20" y2="45"/><content>1</content></cell>
      <cell id="2" start-col="1" start-row="1"><bounding-box x1="30" y1="35" x2="50" y2="45"/><content>2</content></cell>
    </region>
  </table>
</document>)";
  const auto t = parse_xml(doc);
  ASSERT_EQ(t.n_cells(), 3u);
  EXPECT_EQ(*t.cells[0].spans, (SpanIndices{0, 0, 0, 1}));
  EXPECT_EQ(*t.cells[1].spans, (SpanIndices{1, 1, 0, 0}));
  EXPECT_EQ(t.cells[2].content, "2");
}

TEST(Json, RoundtripOnGeneratedTables) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto t = generate(seed, 1 + seed % 9, 1 + (seed / 9) % 9, 0.3, 0.3, 13.7);
    CanonicalTableFile f{t, spans_to_adjacency(t)};
    EXPECT_EQ(parse_json(to_json(f)), f) << seed;
    CanonicalTableFile bare{t, std::nullopt};
    EXPECT_EQ(parse_json(to_json(bare)), bare) << seed;
  }
}

TEST(Json, CellsWithoutSpans) {
  const auto f = parse_json(cells_json(R"({"id": 7, "x1": 0, "y1": 0, "x2": 1.5, "y2": 2, "content": "a b"})"));
  ASSERT_EQ(f.table.n_cells(), 1u);
  EXPECT_EQ(f.table.cells[0].id, 7);
  EXPECT_EQ(f.table.cells[0].bbox.x2, 1.5);
  EXPECT_FALSE(f.table.cells[0].spans);
  EXPECT_FALSE(f.adjacency);
}

TEST(Json, Errors) {
  const std::string cell = R"({"id": 0, "x1": 0, "y1": 0, "x2": 1, "y2": 1, "content": "a"})";
  EXPECT_EQ(code_of([] { parse_json("{"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_json("[]"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_json(R"({"version": "other/1", "cells": []})"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([&] { parse_json(cells_json(cell, R"(, "extra": 1)")); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_json(cells_json(R"({"id": 0, "x1": 0, "y1": 0, "x2": 1, "y2": 1, "colour": 1})")); }),
            ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_json(cells_json(R"({"id": 0, "x1": 0, "y1": 0, "x2": 1})")); }),
            ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_json(cells_json(R"({"id": 0, "x1": "0", "y1": 0, "x2": 1, "y2": 1})")); }),
            ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_json(cells_json(R"({"id": 0, "x1": 0, "y1": 0, "x2": 1, "y2": 1, "sr": 0})")); }),
            ErrorCode::kParseError);
  EXPECT_EQ(
      code_of([] { parse_json(cells_json(R"({"id": 0, "x1": 0, "y1": 0, "x2": 1, "y2": 1, "content": "a", "empty": true})")); }),
      ErrorCode::kInvariantViolation);
  EXPECT_EQ(code_of([] { parse_json(cells_json(R"({"id": 0, "x1": 2, "y1": 0, "x2": 1, "y2": 1})")); }),
            ErrorCode::kInvariantViolation);
  EXPECT_EQ(code_of([&] { parse_json(cells_json(cell, R"(, "row_adjacency": [[1]])")); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([&] { parse_json(cells_json(cell, R"(, "row_adjacency": [[1, 0]], "col_adjacency": [[1, 0]])")); }),
            ErrorCode::kDimensionMismatch);
}

TEST(Json, AdjacencyFixtureRecoversSpans) {
  // A spans both columns of row 0; B and C sit below it.
  const auto f = parse_json(cells_json(
      R"({"id": 0, "x1": 0, "y1": 0, "x2": 200, "y2": 40, "content": "A"},
         {"id": 1, "x1": 0, "y1": 40, "x2": 100, "y2": 80, "content": "B"},
         {"id": 2, "x1": 100, "y1": 40, "x2": 200, "y2": 80, "content": "C"})",
      R"(, "row_adjacency": [[1, 0, 0], [0, 1, 1], [0, 1, 1]],
         "col_adjacency": [[1, 1, 1], [1, 1, 0], [1, 0, 1]])"));
  ASSERT_TRUE(f.adjacency);
  const auto t = adjacency_to_spans(f.table, *f.adjacency);
  EXPECT_EQ(*t.cells[0].spans, (SpanIndices{0, 0, 0, 1}));
  EXPECT_EQ(*t.cells[1].spans, (SpanIndices{1, 1, 0, 0}));
  EXPECT_EQ(*t.cells[2].spans, (SpanIndices{1, 1, 1, 1}));
}

TEST(Files, ReadWriteAndMissing) {
  const auto dir = std::filesystem::temp_directory_path() / "tabstruct_io_test";
  std::filesystem::create_directories(dir);
  const auto t = generate(4, 3, 3, 0.3, 0.2, 2.0);
  write_xml(t, (dir / "t.xml").string());
  write_json({t, std::nullopt}, (dir / "t.json").string());
  EXPECT_EQ(sorted_by_id(read_table_file((dir / "t.xml").string()).table), t);
  EXPECT_EQ(read_table_file((dir / "t.json").string()).table, t);
  EXPECT_EQ(code_of([&] { read_table_file((dir / "missing.json").string()); }), ErrorCode::kIoFailure);
  EXPECT_EQ(code_of([&] { write_xml(t, (dir / "no_such_dir" / "t.xml").string()); }), ErrorCode::kIoFailure);
  std::filesystem::remove_all(dir);
}

TEST(FormatNumber, ShortestRoundtrip) {
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  for (double v : {1.0 / 3.0, 123.456789012345, 1e-7, 6.02e23}) EXPECT_EQ(std::stod(format_number(v)), v);
}
