#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "test_support.hpp"
#include "tkhist/error.hpp"
#include "tkhist/synthetic.hpp"

namespace tkhist {
namespace {

std::vector<std::size_t> sorted_frequencies(const ColumnData& column) {
  std::unordered_map<KeyValue, std::size_t> counts;
  for (std::size_t row = 0; row < column.size(); ++row) {
    ++counts[column.integer(row)];
  }
  std::vector<std::size_t> frequencies;
  for (const auto& [key, count] : counts) {
    frequencies.push_back(count);
  }
  std::sort(frequencies.rbegin(), frequencies.rend());
  return frequencies;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

TEST(SyntheticTest, FixedSeedGivesIdenticalFiles) {
  SyntheticSpec spec;
  spec.table_count = 3;
  spec.rows = 500;
  testing::TempDir first("tkhist-syn-a");
  testing::TempDir second("tkhist-syn-b");
  auto a = generate_synthetic(spec, 9);
  auto b = generate_synthetic(spec, 9);
  write_dataset(a, first.path());
  write_dataset(b, second.path());
  for (const auto* name : {"t0.csv", "t1.csv", "t2.csv"}) {
    const auto left = read_file(first.path() / name);
    EXPECT_FALSE(left.empty());
    EXPECT_EQ(left, read_file(second.path() / name)) << name;
  }
  EXPECT_NE(generate_synthetic(spec, 10).tables.at("t1"), a.tables.at("t1"));
}

TEST(SyntheticTest, WrittenSchemaLoadsBack) {
  SyntheticSpec spec;
  spec.rows = 50;
  testing::TempDir dir("tkhist-syn-schema");
  auto dataset = generate_synthetic(spec, 1);
  write_dataset(dataset, dir.path());
  const auto schema = load_schema(dir.path() / "schema.json");
  ASSERT_EQ(schema.tables.size(), 2u);
  EXPECT_EQ(ingest_table(schema.table("t1"), schema), dataset.tables.at("t1"));
}

TEST(SyntheticTest, ForeignKeysReferenceExistingIds) {
  SyntheticSpec spec;
  spec.table_count = 4;
  spec.rows = 300;
  spec.layout = SyntheticLayout::kChain;
  const auto dataset = generate_synthetic(spec, 5);
  for (const auto& fk : dataset.schema.foreign_keys) {
    const auto& child = dataset.tables.at(fk.from.table).column(fk.from.column);
    for (std::size_t row = 0; row < child.size(); ++row) {
      EXPECT_GE(child.integer(row), 1);
      EXPECT_LE(child.integer(row), 300);
    }
  }
  EXPECT_EQ(dataset.schema.foreign_keys.size(), 3u);
  EXPECT_FALSE(dataset.tables.at("t3").has_column("id"));
}

TEST(SyntheticTest, UniformWhenSkewIsZero) {
  SyntheticSpec spec;
  spec.rows = 10'000;
  spec.skew = 0.0;
  const auto dataset = generate_synthetic(spec, 3);
  const auto frequencies = sorted_frequencies(dataset.tables.at("t1").column("k"));
  // Each key count is close to Poisson(1): about 1 - 1/e of the keys occur and none is frequent.
  const double occupied = static_cast<double>(frequencies.size()) / 10'000.0;
  EXPECT_NEAR(occupied, 0.632, 0.02);
  EXPECT_LE(frequencies.front(), 12u);
}

TEST(SyntheticTest, SkewConcentratesMass) {
  SyntheticSpec spec;
  spec.rows = 10'000;
  spec.skew = 1.2;
  const auto dataset = generate_synthetic(spec, 3);
  const auto frequencies = sorted_frequencies(dataset.tables.at("t1").column("k"));
  std::size_t top = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    top += frequencies[i];
  }
  EXPECT_GT(static_cast<double>(top) / 10'000.0, 0.3);
}

TEST(SyntheticTest, CorrelatedAttributeFollowsPopularity) {
  SyntheticSpec spec;
  spec.rows = 2'000;
  spec.correlated = true;
  const auto dataset = generate_synthetic(spec, 3);
  const auto& table = dataset.tables.at("t1");
  std::unordered_map<KeyValue, std::size_t> counts;
  for (std::size_t row = 0; row < table.row_count; ++row) {
    ++counts[table.column("k").integer(row)];
  }
  const auto top = std::max_element(counts.begin(), counts.end(),
                                    [](const auto& a, const auto& b) { return a.second < b.second; });
  for (std::size_t row = 0; row < table.row_count; ++row) {
    if (table.column("k").integer(row) == top->first) {
      EXPECT_LT(table.column("y").integer(row), 5);
    }
  }
}

TEST(SyntheticTest, InvalidSpecs) {
  SyntheticSpec spec;
  spec.table_count = 1;
  EXPECT_THROW(validate_spec(spec), Error);
  spec.table_count = 4;
  spec.layout = SyntheticLayout::kChainStar;
  EXPECT_THROW(validate_spec(spec), Error);
  spec.layout = SyntheticLayout::kStar;
  spec.skew = -1;
  EXPECT_THROW(validate_spec(spec), Error);
  EXPECT_THROW(parse_layout("ring"), Error);
  EXPECT_EQ(parse_layout(to_string(SyntheticLayout::kChainStar)), SyntheticLayout::kChainStar);
}

TEST(SyntheticTest, PureJoinWorkloadEnumeratesConnectedSubsets) {
  SyntheticSpec spec;
  spec.table_count = 3;
  spec.rows = 10;
  const auto dataset = generate_synthetic(spec, 1);
  // Star with center t0: {t0,t1}, {t0,t2} and {t0,t1,t2}.
  EXPECT_EQ(pure_join_workload(dataset.schema).size(), 3u);
  const auto filtered = correlated_workload(dataset.schema, {5, 50});
  EXPECT_EQ(filtered.size(), 4u);
}

}  // namespace
}  // namespace tkhist
