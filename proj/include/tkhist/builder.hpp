#pragma once

#include <map>
#include <string>
#include <vector>

#include "tkhist/catalog.hpp"
#include "tkhist/state.hpp"

namespace tkhist {

std::map<std::string, TableData> ingest_all(const Schema& schema);

// One template per connected component of the foreign-key graph; edges that would close a
// cycle between tables are left out.
std::vector<JoinTemplate> default_templates(const Schema& schema);

// Offline state building: aligned key domains, 1D key histograms, 2D key x column histograms,
// table-level histograms, categorical frequency histograms and dominant-path correlations.
State build_state(const Schema& schema, const std::map<std::string, TableData>& tables, const BuildConfig& config);

struct UpdateResult {
  std::size_t applied = 0;
  std::vector<std::string> rejected;
};

// Incremental inserts into an existing state. Rows whose key falls outside its domain are rejected.
UpdateResult apply_inserts(State& state, const std::string& table, const TableData& rows);

}  // namespace tkhist
