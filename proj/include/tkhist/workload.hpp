#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "tkhist/estimator.hpp"
#include "tkhist/metrics.hpp"
#include "tkhist/oracle.hpp"

namespace tkhist {

// One query per line; `-- ` starts a comment line and an optional `||N` suffix gives the truth.
struct WorkloadEntry {
  std::size_t line = 0;
  std::string sql;
  std::optional<std::uint64_t> truth;
};

std::vector<WorkloadEntry> parse_workload(std::istream& in);
std::vector<WorkloadEntry> load_workload(const std::filesystem::path& path);

struct WorkloadRecord {
  std::size_t line = 0;
  std::optional<EstimationReport> report;
  std::string error;    // set when the query failed
  bool skipped = false; // oracle cap exceeded

  nlohmann::json to_json() const;
};

struct EvaluateOptions {
  EstimateOptions estimate;
  // When set, missing truths are computed with the oracle.
  const std::map<std::string, TableData>* oracle_tables = nullptr;
  std::uint64_t oracle_cap = kDefaultOracleCap;
};

// Per-query failures are recorded and evaluation continues.
std::vector<WorkloadRecord> evaluate_workload(const std::vector<WorkloadEntry>& entries, const State& state,
                                              const EvaluateOptions& options);

struct WorkloadSummary {
  QErrorSummary q_error;
  std::size_t estimated = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;
  double mean_latency_ms = 0.0;
};

WorkloadSummary summarize_records(const std::vector<WorkloadRecord>& records);

void write_summary_header(std::ostream& out, bool with_sweep_columns);
void write_summary_row(std::ostream& out, const WorkloadSummary& summary, std::uint64_t state_bytes,
                       std::optional<std::pair<std::size_t, std::size_t>> n_and_k = std::nullopt);

struct SweepOptions {
  std::vector<std::size_t> bins{20, 50, 100, 200, 400};
  std::vector<std::size_t> ks{0, 5, 10, 20};
  std::size_t correlation_cap = 1000;
  EvaluateOptions evaluate;
};

// Builds one state per (n, k) pair and evaluates the workload on it. Writes one summary row per
// pair to `summary` and one row per query to `raw`.
void run_sweep(const Schema& schema, const std::map<std::string, TableData>& tables,
               std::vector<WorkloadEntry> entries, const SweepOptions& options, std::ostream& summary,
               std::ostream& raw);

}  // namespace tkhist
