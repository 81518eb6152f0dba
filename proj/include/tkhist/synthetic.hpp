#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tkhist/catalog.hpp"

namespace tkhist {

// star: t0.id is a primary key referenced by t1.k .. t(m-1).k.
// chain: t(i).prev references t(i-1).id.
// chain_star: two stars sharing a bridge table; t0.id <- t1.a, t2.a and t2.id <- t3.b, t4.b.
enum class SyntheticLayout { kStar, kChain, kChainStar };

std::string_view to_string(SyntheticLayout layout);
SyntheticLayout parse_layout(std::string_view text);

struct SyntheticSpec {
  std::size_t table_count = 2;
  std::size_t rows = 10'000;
  SyntheticLayout layout = SyntheticLayout::kStar;
  double skew = 1.2;
  // When set, the integer attribute y follows the popularity rank of the row's foreign key.
  bool correlated = false;
};

void validate_spec(const SyntheticSpec& spec);

struct SyntheticDataset {
  Schema schema;
  std::map<std::string, TableData> tables;
};

// Deterministic for a fixed seed. Foreign keys are Zipf(skew) distributed over the referenced
// primary keys, with popularity ranks assigned to keys by a seeded permutation. Every table also
// carries a uniform real x, an integer y (rank plus noise in [0, 5) when correlated) and a
// categorical c with eight labels.
SyntheticDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

// Writes one CSV per table plus schema.json into `dir` and points the schema sources at them.
void write_dataset(SyntheticDataset& dataset, const std::filesystem::path& dir);

// COUNT(*) queries over every connected subset of at least two tables of the foreign-key graph.
std::vector<std::string> pure_join_workload(const Schema& schema);

// Star joins on t0.id with range filters y >= threshold on t1, which remove the most popular keys
// of t1.k when the data is correlated.
std::vector<std::string> correlated_workload(const Schema& schema, const std::vector<int>& thresholds);

}  // namespace tkhist
