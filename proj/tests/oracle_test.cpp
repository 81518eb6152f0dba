#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "tkhist/error.hpp"
#include "tkhist/oracle.hpp"

namespace tkhist {
namespace {

using testing::int_column;
using testing::nullable_column;

Schema schema_for(const std::map<std::string, TableData>& tables) {
  Schema schema;
  for (const auto& [name, table] : tables) {
    std::initializer_list<std::string> keys{"k", "j"};
    schema.tables.push_back(testing::make_def(table, keys));
  }
  return schema;
}

Query resolved(const std::string& sql, const std::map<std::string, TableData>& tables) {
  auto query = parse_sql(sql);
  resolve_query(query, schema_for(tables));
  return query;
}

std::map<std::string, TableData> r_and_s() {
  std::map<std::string, TableData> tables;
  tables.emplace("r", testing::make_table("r", {{"k", int_column({1, 1, 1, 2, 3})}, {"v", int_column({1, 2, 3, 4, 5})}}));
  tables.emplace("s", testing::make_table("s", {{"k", int_column({1, 1, 2, 4})}}));
  return tables;
}

TEST(OracleTest, SmallJoin) {
  const auto tables = r_and_s();
  EXPECT_EQ(oracle_count(resolved("SELECT COUNT(*) FROM r, s WHERE r.k = s.k", tables), tables), 7u);
  EXPECT_EQ(oracle_count(resolved("SELECT COUNT(*) FROM r, s WHERE r.k = s.k AND r.v >= 3", tables), tables), 3u);
  EXPECT_EQ(oracle_count(resolved("SELECT COUNT(*) FROM r WHERE r.v < 3", tables), tables), 2u);
}

TEST(OracleTest, AlwaysFalsePredicateGivesZero) {
  const auto tables = r_and_s();
  EXPECT_EQ(oracle_count(resolved("SELECT COUNT(*) FROM r, s WHERE r.k = s.k AND r.v > 100", tables), tables), 0u);
}

TEST(OracleTest, SelfJoinThroughAliases) {
  const auto tables = r_and_s();
  // Key 1 appears three times in r: 9 pairs, plus one pair each for keys 2 and 3.
  EXPECT_EQ(oracle_count(resolved("SELECT COUNT(*) FROM r a, r b WHERE a.k = b.k", tables), tables), 11u);
}

TEST(OracleTest, NullKeysNeverMatch) {
  std::map<std::string, TableData> tables;
  tables.emplace("a", testing::make_table("a", {{"k", nullable_column({1, std::nullopt, std::nullopt})}}));
  tables.emplace("b", testing::make_table("b", {{"k", nullable_column({1, std::nullopt})}}));
  const auto query = resolved("SELECT COUNT(*) FROM a, b WHERE a.k = b.k", tables);
  EXPECT_EQ(oracle_count(query, tables), 1u);
  EXPECT_EQ(testing::nested_loop_count(query, tables), 1u);
}

TEST(OracleTest, CapExceeded) {
  std::map<std::string, TableData> tables;
  tables.emplace("a", testing::make_table("a", {{"k", int_column(std::vector<KeyValue>(200, 7))}}));
  tables.emplace("b", testing::make_table("b", {{"k", int_column(std::vector<KeyValue>(200, 7))}}));
  const auto query = resolved("SELECT COUNT(*) FROM a, b WHERE a.k = b.k", tables);
  EXPECT_THROW(oracle_count(query, tables, 39'999), CapExceededError);
  EXPECT_EQ(oracle_count(query, tables, 40'000), 40'000u);
}

TEST(OracleTest, DisconnectedQueryIsRejected) {
  const auto tables = r_and_s();
  EXPECT_THROW(oracle_count(resolved("SELECT COUNT(*) FROM r, s", tables), tables), Error);
}

TEST(OracleTest, MatchesNestedLoopsOnRandomInstances) {
  std::mt19937_64 rng(2024);
  for (int instance = 0; instance < 50; ++instance) {
    std::uniform_int_distribution<KeyValue> key(1, 1 + instance % 6);
    std::uniform_int_distribution<std::size_t> size(0, 12);
    std::bernoulli_distribution null_key(0.1);
    auto column = [&](std::size_t rows) {
      std::vector<std::optional<KeyValue>> values;
      for (std::size_t i = 0; i < rows; ++i) {
        values.push_back(null_key(rng) ? std::nullopt : std::optional<KeyValue>(key(rng)));
      }
      return nullable_column(values);
    };
    std::map<std::string, TableData> tables;
    const auto a_rows = size(rng);
    const auto b_rows = size(rng);
    const auto c_rows = size(rng);
    tables.emplace("a", testing::make_table("a", {{"k", column(a_rows)}, {"v", column(a_rows)}}));
    tables.emplace("b", testing::make_table("b", {{"k", column(b_rows)}, {"j", column(b_rows)}}));
    tables.emplace("c", testing::make_table("c", {{"j", column(c_rows)}}));
    const std::string sql = instance % 2 == 0
                                ? "SELECT COUNT(*) FROM a, b, c WHERE a.k = b.k AND b.j = c.j AND a.v <= 3"
                                : "SELECT COUNT(*) FROM a, b, c WHERE a.k = b.k AND a.k = c.j";
    const auto query = resolved(sql, tables);
    EXPECT_EQ(oracle_count(query, tables), testing::nested_loop_count(query, tables)) << "instance " << instance;
  }
}

}  // namespace
}  // namespace tkhist
