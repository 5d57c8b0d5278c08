#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracles/oracles.hpp"
#include "tabstruct/align_loss.hpp"
#include "tabstruct/gt_prep.hpp"
#include "tabstruct/rng.hpp"
#include "tabstruct/synth.hpp"

using namespace tabstruct;

namespace {

// Three cells starting in row 0 with y1 = 10, 12, 10; every other group is a
// singleton (distinct end rows and columns).
TableAnnotation ten_twelve_ten() {
  return {{CellBox{0, {0, 10, 10, 20}, SpanIndices{0, 0, 0, 0}, "a"},
           CellBox{1, {20, 12, 30, 50}, SpanIndices{0, 1, 1, 1}, "b"},
           CellBox{2, {40, 10, 50, 70}, SpanIndices{0, 2, 2, 2}, "c"}}};
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

TEST(AlignmentLoss, ZeroOnUnifiedTables) {
  const auto u = unify_boxes(generate(5, 6, 6, 0.3, 0.1, 7.0));
  const auto b = alignment_loss(u);
  EXPECT_EQ(b.l1, 0.0);
  EXPECT_EQ(b.l2, 0.0);
  EXPECT_EQ(b.l3, 0.0);
  EXPECT_EQ(b.l4, 0.0);
  EXPECT_EQ(b.total, 0.0);
}

TEST(AlignmentLoss, TenTwelveTenIsEight) {
  const auto t = ten_twelve_ten();
  EXPECT_DOUBLE_EQ(oracle::alignment_loss_pairs(t), 8.0);
  const auto b = alignment_loss(t);
  EXPECT_DOUBLE_EQ(b.l1, 8.0);
  EXPECT_EQ(b.l2, 0.0);
  EXPECT_EQ(b.l3, 0.0);
  EXPECT_EQ(b.l4, 0.0);
  EXPECT_DOUBLE_EQ(b.total, 8.0);
}

TEST(AlignmentLoss, SingleCellIsZero) {
  TableAnnotation t{{CellBox{0, {3, 4, 5, 6}, SpanIndices{0, 0, 0, 0}, "a"}}};
  EXPECT_EQ(alignment_loss(t).total, 0.0);
}

TEST(AlignmentLoss, MissingSpans) {
  TableAnnotation t{{CellBox{0, {3, 4, 5, 6}, std::nullopt, "a"}}};
  EXPECT_THROW(alignment_loss(t), Error);
  EXPECT_THROW(alignment_loss_grad(t), Error);
}

TEST(AlignmentLoss, MatchesPairEnumerationAndComponentsSum) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto t = generate(seed, 1 + seed % 9, 1 + (seed / 9) % 9, 0.3, 0.0, 9.0);
    const auto b = alignment_loss(t);
    EXPECT_NEAR(b.total, oracle::alignment_loss_pairs(t), 1e-9 * std::max(1.0, b.total));
    EXPECT_EQ(b.total, b.l1 + b.l2 + b.l3 + b.l4);
    EXPECT_GE(std::min({b.l1, b.l2, b.l3, b.l4}), 0.0);
  }
}

TEST(AlignmentLoss, TranslationInvariantAndQuadraticInScale) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto t = generate(seed, 5, 4, 0.2, 0.0, 5.0);
    const double base = alignment_loss(t).total;
    auto moved = t, scaled = t;
    for (auto& c : moved.cells) c.bbox = {c.bbox.x1 + 37.25, c.bbox.y1 - 11.5, c.bbox.x2 + 37.25, c.bbox.y2 - 11.5};
    for (auto& c : scaled.cells) c.bbox = {c.bbox.x1 * 2.5, c.bbox.y1 * 2.5, c.bbox.x2 * 2.5, c.bbox.y2 * 2.5};
    EXPECT_LE(rel_err(alignment_loss(moved).total, base), 1e-9);
    EXPECT_LE(rel_err(alignment_loss(scaled).total, 6.25 * base), 1e-9);
  }
}

TEST(AlignmentLoss, PermutationInvariant) {
  auto t = generate(9, 6, 5, 0.3, 0.0, 5.0);
  const auto before = alignment_loss(t);
  std::reverse(t.cells.begin(), t.cells.end());
  std::rotate(t.cells.begin(), t.cells.begin() + 3, t.cells.end());
  const auto after = alignment_loss(t);
  EXPECT_DOUBLE_EQ(before.l1, after.l1);
  EXPECT_DOUBLE_EQ(before.l2, after.l2);
  EXPECT_DOUBLE_EQ(before.l3, after.l3);
  EXPECT_DOUBLE_EQ(before.l4, after.l4);
}

TEST(AlignmentLossGrad, TenTwelveTenOutlier) {
  const auto g = alignment_loss_grad(ten_twelve_ten());
  EXPECT_DOUBLE_EQ(g[1].dy1, 8.0);
  EXPECT_DOUBLE_EQ(g[0].dy1, -4.0);
  EXPECT_DOUBLE_EQ(g[2].dy1, -4.0);
  const auto fd = oracle::central_difference(ten_twelve_ten(), 1, 1, 1e-4,
                                             [](const TableAnnotation& u) { return alignment_loss(u).total; });
  EXPECT_LE(rel_err(g[1].dy1, fd), 1e-6);
  // Unshared coordinates have zero gradient.
  EXPECT_EQ(g[1].dy2, 0.0);
  EXPECT_EQ(g[1].dx1, 0.0);
}

TEST(AlignmentLossGrad, ZeroOnAlignedGrid) {
  for (const auto& g : alignment_loss_grad(generate(2, 4, 4, 0.3, 0.0, 0.0))) {
    EXPECT_EQ(g.dx1, 0.0);
    EXPECT_EQ(g.dy1, 0.0);
    EXPECT_EQ(g.dx2, 0.0);
    EXPECT_EQ(g.dy2, 0.0);
  }
}

TEST(AlignmentLossGrad, GroupGradientsSumToZero) {
  const auto t = generate(4, 6, 6, 0.2, 0.0, 8.0);
  const auto g = alignment_loss_grad(t);
  std::map<int, double> per_row;
  for (std::size_t i = 0; i < t.cells.size(); ++i) per_row[t.cells[i].spans->sr] += g[i].dy1;
  for (const auto& [r, s] : per_row) EXPECT_NEAR(s, 0.0, 1e-9);
}

TEST(AlignmentLossGrad, MatchesFiniteDifferences) {
  const auto loss = [](const TableAnnotation& u) { return alignment_loss(u).total; };
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto t = generate(seed, 1 + seed % 6, 1 + (seed / 6) % 6, 0.3, 0.0, 12.0);
    const auto g = alignment_loss_grad(t);
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
      const double analytic[4] = {g[i].dx1, g[i].dy1, g[i].dx2, g[i].dy2};
      for (int k = 0; k < 4; ++k)
        EXPECT_LE(rel_err(analytic[k], oracle::central_difference(t, i, k, 1e-4, loss)), 1e-6)
            << "seed " << seed << " cell " << i << " coord " << k;
    }
  }
}

TEST(TotalLoss, Composition) {
  EXPECT_EQ(total_loss({}), 0.0);
  EXPECT_EQ(total_loss({1, 2, 3, 4, 5}), 15.0);
  TotalLossInputs in;
  in.l_align = alignment_loss(ten_twelve_ten()).total;
  EXPECT_DOUBLE_EQ(total_loss(in), 8.0);
  in.align_weight = 0.5;
  EXPECT_DOUBLE_EQ(total_loss(in), 4.0);
}

TEST(TotalLoss, RejectsNonFiniteAndNegative) {
  TotalLossInputs in;
  in.l_mask = std::numeric_limits<double>::quiet_NaN();
  try {
    total_loss(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
  }
  in.l_mask = std::numeric_limits<double>::infinity();
  EXPECT_THROW(total_loss(in), Error);
  in.l_mask = -1.0;
  try {
    total_loss(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNegativeValue);
  }
}
