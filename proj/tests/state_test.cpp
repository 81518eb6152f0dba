#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "tkhist/builder.hpp"
#include "tkhist/error.hpp"
#include "tkhist/state.hpp"
#include "tkhist/synthetic.hpp"

namespace tkhist {
namespace {

using testing::int_column;

std::pair<Schema, std::map<std::string, TableData>> table_one_dataset() {
  auto a = testing::make_table("a", {{"k", int_column(std::vector<KeyValue>{2, 2, 2, 2, 3, 3, 5})}});
  auto b = testing::make_table("b", {{"k", int_column(std::vector<KeyValue>{2, 3, 4})}});
  Schema schema;
  schema.tables = {testing::make_def(a, {"k"}), testing::make_def(b, {"k"})};
  schema.foreign_keys = {{{"a", "k"}, {"b", "k"}}};
  std::map<std::string, TableData> tables;
  tables.emplace("a", std::move(a));
  tables.emplace("b", std::move(b));
  return {schema, tables};
}

State synthetic_state(std::size_t tables, std::size_t rows) {
  SyntheticSpec spec;
  spec.table_count = tables;
  spec.rows = rows;
  spec.correlated = true;
  const auto dataset = generate_synthetic(spec, 5);
  return build_state(dataset.schema, dataset.tables, BuildConfig{50, 5, 1000});
}

TEST(StateTest, TableOneRoundTrip) {
  const auto [schema, tables] = table_one_dataset();
  const auto state = build_state(schema, tables, BuildConfig{1, 1, 1000});
  const auto stats = state.table("a").key_hist("k").bin_stats(0);
  EXPECT_EQ(stats.nv, 3u);
  EXPECT_EQ(stats.ndv, 2u);
  EXPECT_DOUBLE_EQ(stats.bac, 1.5);

  const auto loaded = deserialize_state(serialize_state(state));
  const auto again = loaded.table("a").key_hist("k").bin_stats(0);
  EXPECT_EQ(again.nv, stats.nv);
  EXPECT_EQ(again.ndv, stats.ndv);
  EXPECT_EQ(*again.container, *stats.container);
  EXPECT_EQ(loaded.tables, state.tables);
  EXPECT_EQ(loaded.domains, state.domains);
  EXPECT_EQ(loaded.correlations, state.correlations);
  EXPECT_EQ(loaded.config, state.config);
}

TEST(StateTest, SyntheticStateSavesByteIdentically) {
  const auto state = synthetic_state(4, 2'000);
  testing::TempDir dir("tkhist-state");
  save_state(state, dir.path() / "first.json");
  const auto loaded = load_state(dir.path() / "first.json");
  save_state(loaded, dir.path() / "second.json");
  auto read = [](const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  };
  EXPECT_EQ(read(dir.path() / "first.json"), read(dir.path() / "second.json"));
  EXPECT_EQ(loaded.tables, state.tables);
  EXPECT_EQ(serialize_state(synthetic_state(4, 2'000)), serialize_state(state));
}

TEST(StateTest, WrongMagicIsUnrecognized) {
  try {
    deserialize_state(R"({"magic": "SOMETHING-ELSE", "version": 1})");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unrecognized state file"), std::string::npos);
  }
  EXPECT_THROW(deserialize_state("not json at all"), Error);
}

TEST(StateTest, VersionMismatchAndCorruptionAreReported) {
  const auto [schema, tables] = table_one_dataset();
  auto document = nlohmann::json::parse(serialize_state(build_state(schema, tables, BuildConfig{1, 1, 1000})));
  auto future = document;
  future["version"] = 2;
  try {
    deserialize_state(future.dump());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
  auto broken = document;
  broken.erase("tables");
  EXPECT_THROW(deserialize_state(broken.dump()), Error);
}

TEST(StateTest, MissingFileIsAnError) {
  EXPECT_THROW(load_state("/nonexistent/tkhist/state.json"), Error);
}

}  // namespace
}  // namespace tkhist
