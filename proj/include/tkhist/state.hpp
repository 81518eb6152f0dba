#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tkhist/catalog.hpp"
#include "tkhist/correlation.hpp"
#include "tkhist/histogram.hpp"

namespace tkhist {

inline constexpr std::string_view kStateMagic = "TKHIST-STATE-v1";
inline constexpr int kStateVersion = 1;

struct BuildConfig {
  std::size_t bin_count = 200;
  std::size_t k = 20;
  std::size_t correlation_cap = 1000;

  bool operator==(const BuildConfig&) const = default;
};

struct ColumnStats {
  ValueKind kind = ValueKind::kInteger;
  ColumnRole role = ColumnRole::kAttribute;
  ColumnClass column_class = ColumnClass::kNumeric;
  Count non_null = 0;

  bool operator==(const ColumnStats&) const = default;
};

struct TableStats {
  std::string name;
  Count row_count = 0;
  std::map<std::string, ColumnStats> columns;
  std::map<std::string, TKHist1D> key_hists;                                // key column -> 1D
  std::map<std::pair<std::string, std::string>, TKHist2D> pair_hists;       // (key, other) -> 2D
  std::map<std::string, TKHist2D> table_hists;                              // column -> table level
  std::map<std::string, FrequencyHist> frequency_hists;                     // categorical columns

  const TKHist1D& key_hist(std::string_view column) const;
  const TKHist2D& pair_hist(const std::string& key_column, const std::string& other) const;

  bool operator==(const TableStats&) const = default;
};

struct State {
  BuildConfig config;
  Schema schema;
  std::vector<KeyDomain> domains;
  std::map<std::string, TableStats> tables;
  CorrelationMap correlations;

  bool built() const { return !tables.empty(); }
  const KeyDomain* domain_of(const ColumnRef& column) const;
  const KeyDomain& domain(std::string_view id) const;
  const TableStats& table(std::string_view name) const;
};

std::string serialize_state(const State& state);
State deserialize_state(std::string_view text);
// Writes to a temporary file and renames it into place.
void save_state(const State& state, const std::filesystem::path& path);
State load_state(const std::filesystem::path& path);

}  // namespace tkhist
