#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "tkhist/error.hpp"
#include "tkhist/histogram.hpp"
#include "tkhist/join.hpp"
#include "tkhist/predicate.hpp"

namespace tkhist {
namespace {

using testing::int_column;

Predicate range(const std::string& column, CompareOp op, std::vector<double> operands) {
  Predicate predicate{ColumnRef{"t", column}, op, {}};
  for (const auto value : operands) {
    predicate.operands.push_back(Literal::number(value));
  }
  return predicate;
}

Predicate labels(const std::string& column, CompareOp op, std::vector<std::string> operands) {
  Predicate predicate{ColumnRef{"t", column}, op, {}};
  for (auto& value : operands) {
    predicate.operands.push_back(Literal::text(std::move(value)));
  }
  return predicate;
}

KeyDomain domain_over(KeyValue lo, KeyValue hi, std::size_t bins) {
  KeyDomain domain;
  domain.id = "d";
  domain.members = {{"t", "k"}};
  domain.set_bounds(lo, hi, bins);
  return domain;
}

TKHist2D small_grid() {
  const auto binning = AttributeBinning::equi_width(EquiWidthBinning{5.0, 9.0, 2}, false);
  return build_tkhist2d(int_column(std::vector<KeyValue>{1, 1, 2, 4}), int_column(std::vector<KeyValue>{5, 9, 5, 7}),
                        domain_over(1, 4, 1), binning, "k", "y");
}

TEST(Selectivity2DTest, DirectTabulation) {
  EXPECT_DOUBLE_EQ(selectivity_2d(small_grid(), range("y", CompareOp::kGe, {7})).front(), 0.5);
}

TEST(Selectivity2DTest, FullRangeIsNeutral) {
  const auto fractions = selectivity_2d(small_grid(), range("y", CompareOp::kBetween, {0, 100}));
  EXPECT_DOUBLE_EQ(fractions.front(), 1.0);
}

TEST(Selectivity2DTest, PartialBinsInterpolate) {
  EXPECT_DOUBLE_EQ(selectivity_2d(small_grid(), range("y", CompareOp::kGe, {6})).front(), 0.75);
}

TEST(Selectivity2DTest, ColumnMismatchRejected) {
  EXPECT_THROW(selectivity_2d(small_grid(), range("z", CompareOp::kGe, {6})), Error);
}

TEST(Selectivity2DTest, AlignedPredicateMatchesFullScan) {
  std::mt19937_64 rng(17);
  std::geometric_distribution<int> skewed(0.01);
  std::vector<KeyValue> keys;
  std::vector<KeyValue> ys;
  for (int i = 0; i < 20'000; ++i) {
    const KeyValue key = 1 + skewed(rng) % 1000;
    keys.push_back(key);
    ys.push_back(std::min<KeyValue>(49, key / 25 + static_cast<KeyValue>(rng() % 10)));
  }
  const auto domain = domain_over(1, 1000, 40);
  const auto y_column = int_column(ys);
  // At most fifty observed integers over fifty bins: every bin is one unit cell, so thresholds are aligned.
  const auto binning = make_attribute_binning(y_column, ColumnClass::kNumeric, 50, nullptr);
  ASSERT_EQ(binning.equi_width_binning().width(), 1.0);
  const auto grid = build_tkhist2d(int_column(keys), y_column, domain, binning, "k", "y");
  auto sorted = ys;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const auto median = sorted[sorted.size() / 2];
  const auto fractions = selectivity_2d(grid, range("y", CompareOp::kLe, {static_cast<double>(median)}));
  std::vector<double> hits(40, 0.0);
  std::vector<double> rows(40, 0.0);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto bin = static_cast<std::size_t>((keys[i] - 1) / 25);
    rows[bin] += 1;
    hits[bin] += ys[i] <= median ? 1 : 0;
  }
  for (std::size_t bin = 0; bin < 40; ++bin) {
    const double expected = rows[bin] == 0 ? 1.0 : hits[bin] / rows[bin];
    EXPECT_NEAR(fractions[bin], expected, 1e-9) << "bin " << bin;
  }
}

TEST(CombineTest, ProductPerBin) {
  const std::vector<BinSelectivity> two{{0.5, 1.0}, {0.4, 0.3}};
  const auto combined = combine_table_selectivity(two);
  EXPECT_DOUBLE_EQ(combined[0], 0.2);
  EXPECT_DOUBLE_EQ(combined[1], 0.3);
  const std::vector<BinSelectivity> one{{0.5, 0.25}};
  EXPECT_EQ(combine_table_selectivity(one), one.front());
  const std::vector<BinSelectivity> mismatched{{0.5}, {0.5, 0.5}};
  EXPECT_THROW(combine_table_selectivity(mismatched), Error);
}

TEST(CombineTest, IndependentAttributesMatchJointSelectivity) {
  std::mt19937_64 rng(29);
  std::vector<KeyValue> keys;
  std::vector<KeyValue> ys;
  std::vector<KeyValue> zs;
  for (int i = 0; i < 40'000; ++i) {
    keys.push_back(1 + static_cast<KeyValue>(rng() % 500));
    ys.push_back(static_cast<KeyValue>(rng() % 100));
    zs.push_back(static_cast<KeyValue>(rng() % 60));
  }
  const auto domain = domain_over(1, 500, 10);
  const auto key_column = int_column(keys);
  const auto y_column = int_column(ys);
  const auto z_column = int_column(zs);
  const auto y_grid = build_tkhist2d(key_column, y_column, domain,
                                     make_attribute_binning(y_column, ColumnClass::kNumeric, 20, nullptr), "k", "y");
  const auto z_grid = build_tkhist2d(key_column, z_column, domain,
                                     make_attribute_binning(z_column, ColumnClass::kNumeric, 20, nullptr), "k", "z");
  const auto y_pred = range("y", CompareOp::kLt, {45});
  const auto z_pred = range("z", CompareOp::kGe, {21});
  const std::vector<BinSelectivity> parts{selectivity_2d(y_grid, y_pred), selectivity_2d(z_grid, z_pred)};
  const auto combined = combine_table_selectivity(parts);
  std::vector<double> hits(10, 0.0);
  std::vector<double> rows(10, 0.0);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto bin = static_cast<std::size_t>((keys[i] - 1) / 50);
    rows[bin] += 1;
    hits[bin] += (ys[i] < 45 && zs[i] >= 21) ? 1 : 0;
  }
  for (std::size_t bin = 0; bin < 10; ++bin) {
    const double joint = hits[bin] / rows[bin];
    EXPECT_NEAR(combined[bin], joint, 0.2 * joint) << "bin " << bin;
  }
}

TEST(CategoricalSelectivityTest, ExactCounts) {
  FrequencyHist hist;
  hist.counts = {{"a", 2}, {"b", 1}};
  EXPECT_DOUBLE_EQ(selectivity_categorical(hist, labels("c", CompareOp::kEq, {"a"}), 3), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(selectivity_categorical(hist, labels("c", CompareOp::kIn, {"a", "b"}), 3), 1.0);
  EXPECT_DOUBLE_EQ(selectivity_categorical(hist, labels("c", CompareOp::kEq, {"z"}), 3), 0.0);
  EXPECT_THROW(selectivity_categorical(hist, range("c", CompareOp::kGe, {1}), 3), Error);
}

TEST(ApplyFiltersTest, ScalesBackgroundOnly) {
  CompositeHist hist("d", EquiWidthBinning{0.0, 10.0, 2});
  hist.bin(0).background = 8;
  hist.bin(0).ndv = 4;
  hist.bin(0).dominant = {{1, 50.0}};
  hist.bin(1).background = 2;
  hist.bin(1).ndv = 2;

  const auto identity = apply_filters(hist, BinSelectivity{1.0, 1.0});
  EXPECT_DOUBLE_EQ(identity.total(), hist.total());

  const auto halved = apply_filters(hist, BinSelectivity{0.5, 0.0});
  EXPECT_DOUBLE_EQ(halved.bin(0).background, 4.0);
  EXPECT_DOUBLE_EQ(halved.bin(0).dominant.at(1), 50.0);
  EXPECT_DOUBLE_EQ(halved.bin(1).background, 0.0);

  const auto scaled = apply_filters(hist, BinSelectivity{0.5, 0.0}, true);
  EXPECT_DOUBLE_EQ(scaled.bin(0).dominant.at(1), 25.0);

  hist.bin(0).dominant.clear();
  EXPECT_DOUBLE_EQ(apply_filters(hist, BinSelectivity{0.0, 0.0}).total(), 0.0);
  EXPECT_THROW(apply_filters(hist, BinSelectivity{1.0}), Error);
}

TEST(RestrictKeyTest, DropsFailingKeysAndScalesBackground) {
  CompositeHist hist("d", EquiWidthBinning{0.0, 10.0, 2});
  hist.bin(0).background = 10;
  hist.bin(0).ndv = 5;
  hist.bin(0).dominant = {{1, 7.0}, {4, 3.0}};
  const auto restricted = restrict_key(hist, range("k", CompareOp::kGe, {3}));
  EXPECT_DOUBLE_EQ(restricted.bin(0).background, 4.0);
  EXPECT_DOUBLE_EQ(restricted.bin(0).ndv, 2.0);
  EXPECT_FALSE(restricted.bin(0).dominant.contains(1));
  EXPECT_DOUBLE_EQ(restricted.bin(0).dominant.at(4), 3.0);
}

TEST(MatchesTest, OperatorsOnNumbersAndText) {
  EXPECT_TRUE(matches(range("y", CompareOp::kBetween, {1, 3}), 3.0));
  EXPECT_FALSE(matches(range("y", CompareOp::kLt, {1}), 1.0));
  EXPECT_TRUE(matches(range("y", CompareOp::kIn, {1, 5}), 5.0));
  EXPECT_TRUE(matches(labels("c", CompareOp::kIn, {"x", "y"}), std::string("y")));
  EXPECT_THROW(matches(range("c", CompareOp::kLt, {1}), std::string("y")), Error);
}

}  // namespace
}  // namespace tkhist
