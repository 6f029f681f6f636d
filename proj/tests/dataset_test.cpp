#include "bkmodes/dataset.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace bkmodes;

TEST(Dataset, RowAccess) {
  const auto ds = CategoricalDataset::from_rows({{0, 1}});
  EXPECT_EQ(DataPoint(ds.row(0).begin(), ds.row(0).end()), DataPoint({0, 1}));

  const auto three = CategoricalDataset::from_rows({{1, 0}, {0, 0}, {2, 3}});
  RowView r = three.row(2);
  EXPECT_EQ(DataPoint(r.begin(), r.end()), DataPoint({2, 3}));

  EXPECT_THROW(three.row(3), std::out_of_range);
}

TEST(Dataset, StructuralChecksAtConstruction) {
  EXPECT_THROW(CategoricalDataset(2, 2, {2, 2}, {0, 1, 0}, {"a", "b"}),
               std::invalid_argument);
  EXPECT_THROW(CategoricalDataset(1, 2, {2}, {0, 1}, {"a", "b"}),
               std::invalid_argument);
  EXPECT_THROW(CategoricalDataset::from_rows({{0, 1}, {0}}),
               std::invalid_argument);
}

TEST(Dataset, ValidateAcceptsWellFormed) {
  const auto ds = CategoricalDataset::from_rows({{0, 1}, {1, 0}}, {2, 2});
  EXPECT_TRUE(validate(ds).empty());
}

TEST(Dataset, ValidateFlagsOutOfRangeCode) {
  const CategoricalDataset ds(2, 2, {3, 3}, {0, 1, 5, 2}, {"a", "b"});
  const auto violations = validate(ds);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].kind, DatasetViolation::Kind::kCodeOutOfRange);
  EXPECT_EQ(violations[0].row, 1u);
  EXPECT_EQ(violations[0].column, 0u);
}

TEST(Dataset, ValidateFlagsOversizedCardinality) {
  const CategoricalDataset ds(1, 1, {300}, {0}, {"a"});
  const auto violations = validate(ds);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].kind,
            DatasetViolation::Kind::kCardinalityOutOfRange);
  EXPECT_NE(violations[0].message.find("300"), std::string::npos);
}

TEST(Dataset, ValidateFlagsEmpty) {
  const CategoricalDataset ds(0, 0, {}, {}, {});
  const auto violations = validate(ds);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].kind, DatasetViolation::Kind::kEmptyDataset);
}

// validate() accepts exactly the datasets whose invariants hold: randomly
// corrupting one cell beyond its cardinality must always be flagged at that
// cell.
TEST(Dataset, ValidateCatchesRandomCorruption) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + draw_below(rng, 20);
    const std::size_t m = 1 + draw_below(rng, 6);
    const std::uint32_t card = 2 + static_cast<std::uint32_t>(draw_below(rng, 5));
    auto rows = testutil::random_rows(rng, n, m, card);
    const std::size_t bad_row = draw_below(rng, n);
    const std::size_t bad_col = draw_below(rng, m);
    rows[bad_row][bad_col] = static_cast<Code>(card + draw_below(rng, 3));
    const auto ds = CategoricalDataset::from_rows(
        rows, std::vector<std::uint32_t>(m, card));
    const auto violations = validate(ds);
    ASSERT_FALSE(violations.empty());
    bool found = false;
    for (const auto& v : violations)
      found = found || (v.row == bad_row && v.column == bad_col);
    EXPECT_TRUE(found);
  }
}

TEST(Dataset, RowRoundTrip) {
  Rng rng(7);
  const auto rows = testutil::random_rows(rng, 17, 5, 4);
  const auto ds = CategoricalDataset::from_rows(rows);
  ASSERT_EQ(ds.n(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    RowView r = ds.row(i);
    EXPECT_EQ(DataPoint(r.begin(), r.end()), rows[i]);
  }
}

TEST(Dataset, RowSubsetAll) {
  const RowSubset s = RowSubset::all(4);
  EXPECT_EQ(s.indices, (std::vector<RowIndex>{0, 1, 2, 3}));
}
