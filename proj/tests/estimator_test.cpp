#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "test_support.hpp"
#include "tkhist/builder.hpp"
#include "tkhist/error.hpp"
#include "tkhist/estimator.hpp"
#include "tkhist/metrics.hpp"
#include "tkhist/oracle.hpp"
#include "tkhist/pipeline.hpp"
#include "tkhist/synthetic.hpp"

namespace tkhist {
namespace {

using testing::int_column;

struct Dataset {
  Schema schema;
  std::map<std::string, TableData> tables;

  void add(TableData table, std::initializer_list<std::string> keys, std::optional<std::string> primary = {}) {
    auto def = testing::make_def(table, keys);
    def.primary_key = std::move(primary);
    schema.tables.push_back(def);
    tables.emplace(table.name, std::move(table));
  }
};

Dataset r_join_s() {
  Dataset dataset;
  dataset.add(testing::make_table("r", {{"k", int_column(std::vector<KeyValue>{1, 1, 1, 2, 3})}}), {"k"});
  dataset.add(testing::make_table("s", {{"k", int_column(std::vector<KeyValue>{1, 1, 2, 4})}}), {"k"});
  dataset.schema.foreign_keys = {{{"r", "k"}, {"s", "k"}}};
  return dataset;
}

std::vector<KeyValue> zipf(std::size_t rows, KeyValue range, double skew, std::mt19937_64& rng, KeyValue stride = 13,
                           KeyValue offset = 0) {
  std::vector<double> weights;
  for (KeyValue r = 1; r <= range; ++r) {
    weights.push_back(1.0 / std::pow(static_cast<double>(r), skew));
  }
  std::discrete_distribution<KeyValue> pick(weights.begin(), weights.end());
  std::vector<KeyValue> keys;
  for (std::size_t i = 0; i < rows; ++i) {
    keys.push_back(1 + (pick(rng) * stride + offset) % range);
  }
  return keys;
}

TEST(MetricsTest, HandExamples) {
  EXPECT_EQ(q_error(10, 100), 10.0);
  EXPECT_EQ(ratio(10, 100), 0.1);
  EXPECT_EQ(q_error(100, 100), 1.0);
  EXPECT_EQ(ratio(100, 100), 1.0);
  EXPECT_EQ(q_error(200, 100), 2.0);
  EXPECT_EQ(ratio(200, 100), 2.0);
}

TEST(MetricsTest, SymmetryAndSentinels) {
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{3, 7}, {1e6, 2}, {5, 5}}) {
    EXPECT_DOUBLE_EQ(q_error(a, b), q_error(b, a));
    EXPECT_NEAR(ratio(a, b) * ratio(b, a), 1.0, 1e-12);
    EXPECT_GE(q_error(a, b), 1.0);
  }
  EXPECT_EQ(q_error(0, 10), std::numeric_limits<double>::infinity());
  EXPECT_THROW(q_error(10, 0), Error);
  EXPECT_THROW(ratio(10, 0), Error);
}

TEST(MetricsTest, PercentilesInterpolate) {
  const std::vector<double> values{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(percentile(values, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(percentile(values, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(percentile(values, 0.0), 1.0);
  const auto summary = summarize(values);
  EXPECT_EQ(summary.count, 4u);
  EXPECT_DOUBLE_EQ(summary.max, 4.0);
  EXPECT_EQ(summarize(std::vector<double>{}).count, 0u);
}

TEST(EstimateTest, UnbuiltStateIsAnError) {
  try {
    estimate("SELECT COUNT(*) FROM r", State{});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("state not built"), std::string::npos);
  }
}

TEST(EstimateTest, SingleTableCountIsExact) {
  const auto dataset = r_join_s();
  const auto state = build_state(dataset.schema, dataset.tables, BuildConfig{});
  const auto report = estimate("SELECT COUNT(*) FROM r", state);
  EXPECT_EQ(report.estimate, 5.0);
  EXPECT_GE(report.latency_ms, 0.0);
}

TEST(EstimateTest, SmallExampleFullCaptureMatchesOracle) {
  const auto dataset = r_join_s();
  const auto state = build_state(dataset.schema, dataset.tables, BuildConfig{1, 3, 1000});
  auto query = parse_sql("SELECT COUNT(*) FROM r, s WHERE r.k = s.k");
  resolve_query(query, dataset.schema);
  const auto truth = testing::nested_loop_count(query, dataset.tables);
  EXPECT_EQ(truth, 7u);
  EXPECT_DOUBLE_EQ(estimate_pure_join(query, decompose(query, state.domains), state), 7.0);
  auto report = estimate("SELECT COUNT(*) FROM r, s WHERE r.k = s.k", state);
  attach_truth(report, truth);
  EXPECT_EQ(*report.q_error, 1.0);
  EXPECT_EQ(*report.ratio, 1.0);
}

TEST(EstimateTest, ZipfTwoTableFullCaptureIsExact) {
  std::mt19937_64 rng(1);
  Dataset dataset;
  dataset.add(testing::make_table("a", {{"k", int_column(zipf(4'000, 600, 1.2, rng))}}), {"k"});
  dataset.add(testing::make_table("b", {{"k", int_column(zipf(4'000, 600, 1.2, rng))}}), {"k"});
  dataset.schema.foreign_keys = {{{"a", "k"}, {"b", "k"}}};
  const auto state = build_state(dataset.schema, dataset.tables, BuildConfig{20, 30, 1000});
  auto query = parse_sql("SELECT COUNT(*) FROM a, b WHERE a.k = b.k");
  resolve_query(query, dataset.schema);
  const auto report = estimate(to_sql(query), state);
  EXPECT_EQ(report.estimate, static_cast<double>(testing::nested_loop_count(query, dataset.tables)));
}

TEST(EstimateTest, DjpcdFlagIrrelevantWithoutPredicates) {
  SyntheticSpec spec;
  spec.table_count = 3;
  spec.rows = 2'000;
  spec.correlated = true;
  const auto dataset = generate_synthetic(spec, 3);
  const auto state = build_state(dataset.schema, dataset.tables, BuildConfig{50, 10, 1000});
  for (const auto& sql : pure_join_workload(dataset.schema)) {
    EXPECT_EQ(estimate(sql, state, EstimateOptions{true}).estimate, estimate(sql, state, EstimateOptions{false}).estimate);
  }
}

// Commenting and posting popularity are independent here: the two Zipf columns use different
// rank-to-key mappings. Chain translation keeps only bin-level mass, so single instances can be
// off by a few x; the geometric mean over seeds must stay within 3x.
TEST(EstimateTest, ForumStyleChainWithinFactorThreeOnAverage) {
  const std::string sql =
      "SELECT COUNT(*) FROM users u, comments c, posts p, postLinks pl "
      "WHERE u.Id = c.UserId AND u.Id = p.OwnerUserId AND p.Id = pl.RelatedPostId";
  double log_sum = 0.0;
  const int seeds = 12;
  for (int seed = 1; seed <= seeds; ++seed) {
    std::mt19937_64 rng(seed);
    Dataset dataset;
    std::vector<KeyValue> user_ids(2'000);
    std::iota(user_ids.begin(), user_ids.end(), 1);
    std::vector<KeyValue> post_ids(3'000);
    std::iota(post_ids.begin(), post_ids.end(), 1);
    dataset.add(testing::make_table("users", {{"Id", int_column(user_ids)}}), {"Id"}, "Id");
    dataset.add(testing::make_table("comments", {{"UserId", int_column(zipf(5'000, 2'000, 1.0, rng))}}), {"UserId"});
    dataset.add(testing::make_table("posts", {{"Id", int_column(post_ids)},
                                              {"OwnerUserId", int_column(zipf(3'000, 2'000, 1.0, rng, 7, 1'001))}}),
                {"Id", "OwnerUserId"}, "Id");
    dataset.add(testing::make_table("postLinks", {{"RelatedPostId", int_column(zipf(2'000, 3'000, 1.0, rng))}}),
                {"RelatedPostId"});
    dataset.schema.foreign_keys = {{{"comments", "UserId"}, {"users", "Id"}},
                                   {{"posts", "OwnerUserId"}, {"users", "Id"}},
                                   {{"postLinks", "RelatedPostId"}, {"posts", "Id"}}};
    const auto state = build_state(dataset.schema, dataset.tables, BuildConfig{});
    auto query = parse_sql(sql);
    resolve_query(query, dataset.schema);
    const auto truth = static_cast<double>(oracle_count(query, dataset.tables));
    const auto estimated = estimate(sql, state).estimate;
    ASSERT_GT(estimated, 0.0);
    log_sum += std::log(ratio(estimated, truth));
  }
  const double geometric_mean = std::exp(log_sum / seeds);
  EXPECT_GE(geometric_mean, 1.0 / 3.0);
  EXPECT_LE(geometric_mean, 3.0);
}

TEST(EstimateTest, ReportJson) {
  EstimationReport report;
  report.query = "q";
  report.estimate = 0;
  attach_truth(report, 5);
  const auto json = report.to_json();
  EXPECT_EQ(json.at("q_error"), "inf");
  EXPECT_EQ(json.at("true_cardinality"), 5);
  EXPECT_EQ(json.at("ratio"), 0.0);
}

KeyDomain domain_over(KeyValue lo, KeyValue hi, std::size_t bins) {
  KeyDomain domain;
  domain.id = "d";
  domain.members = {{"t", "k"}};
  domain.set_bounds(lo, hi, bins);
  return domain;
}

TEST(ErrorBoundTest, FullCapturePassesEverywhere) {
  const auto hist = build_tkhist1d(std::vector<KeyValue>{2, 2, 2, 2, 3, 3, 5}, domain_over(2, 5, 1), 3);
  for (const double epsilon : {1e-9, 0.5, 10.0}) {
    for (const auto& check : error_bound_check(hist, epsilon)) {
      EXPECT_TRUE(check.pass);
    }
  }
}

TEST(ErrorBoundTest, UniformDataWithoutContainers) {
  std::vector<KeyValue> keys;
  for (KeyValue v = 1; v <= 1'000; ++v) {
    keys.push_back(v);
    keys.push_back(v);
  }
  const auto hist = build_tkhist1d(keys, domain_over(1, 1'000, 100), 0);
  const auto report = error_bound_check(hist, 0.5);
  ASSERT_EQ(report.size(), 100u);
  for (std::size_t i = 0; i < report.size(); ++i) {
    const auto& bin = hist.bin(i);
    const double background_fraction = static_cast<double>(bin.nv) / static_cast<double>(bin.total());
    EXPECT_EQ(report[i].pass, !(background_fraction >= 0.5 / 10.0));
    EXPECT_FALSE(report[i].pass);
  }
}

TEST(ErrorBoundTest, PassingBinsGrowWithK) {
  std::mt19937_64 rng(4);
  const auto keys = zipf(20'000, 3'000, 1.2, rng);
  const auto domain = domain_over(1, 3'000, 50);
  std::size_t previous = 0;
  for (const std::size_t k : {0, 1, 2, 5, 10, 20, 40, 80}) {
    std::size_t passing = 0;
    for (const auto& check : error_bound_check(build_tkhist1d(keys, domain, k), 0.5)) {
      passing += check.pass ? 1 : 0;
    }
    EXPECT_GE(passing, previous) << "k " << k;
    previous = passing;
  }
}

TEST(ErrorBoundTest, EmptyHistogramIsAnError) {
  const auto hist = build_tkhist1d(std::vector<KeyValue>{}, domain_over(1, 10, 2), 1);
  EXPECT_THROW(error_bound_check(hist, 0.5), Error);
}

TEST(UpdateTest, InsertsMatchRebuildAndRejectOutOfDomain) {
  const auto dataset = r_join_s();
  auto state = build_state(dataset.schema, dataset.tables, BuildConfig{1, 1, 1000});
  auto rows = testing::make_table("r", {{"k", int_column(std::vector<KeyValue>{1, 3, 4, 9})}});
  const auto result = apply_inserts(state, "r", rows);
  EXPECT_EQ(result.applied, 3u);
  ASSERT_EQ(result.rejected.size(), 1u);
  EXPECT_NE(result.rejected[0].find("outside domain"), std::string::npos);
  const auto& bin = state.table("r").key_hist("k").bin(0);
  EXPECT_EQ(bin.container.frequency(1), 4u);
  EXPECT_EQ(bin.nv, 4u);
  EXPECT_EQ(bin.ndv(), 3u);
  EXPECT_EQ(state.table("r").row_count, 8u);
}

}  // namespace
}  // namespace tkhist
