#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tkhist/histogram.hpp"
#include "tkhist/query.hpp"
#include "tkhist/state.hpp"

namespace tkhist {

struct EstimateOptions {
  bool djpcd = true;
  // Also scale dominant join paths by predicate selectivity.
  bool scale_dominant = false;
  // Compatibility mode of the exclusion test: only the smallest recorded value is checked.
  bool min_only = false;
};

struct EstimationReport {
  std::string query;
  double estimate = 0.0;
  std::optional<std::uint64_t> truth;
  std::optional<double> q_error;
  std::optional<double> ratio;
  double latency_ms = 0.0;

  nlohmann::json to_json() const;
};

// Fills q_error and ratio when the truth is known and positive.
void attach_truth(EstimationReport& report, std::uint64_t truth);

// Parses, resolves, decomposes and estimates one query. The estimate is rounded to the nearest
// integer; latency covers inference only.
EstimationReport estimate(const std::string& sql, const State& state, const EstimateOptions& options = {});

// Unrounded estimate of an already resolved, acyclic query.
double estimate_resolved(const Query& query, const State& state, const EstimateOptions& options = {});

struct BinBoundCheck {
  std::size_t bin = 0;
  double value = 0.0;  // sqrt(n) * background rows / bin rows
  bool pass = true;
};

// Per-bin evaluation of sqrt(n) * (BAC_i * NDV_i) / |bin_i| < epsilon. Empty bins pass.
// Throws on a histogram without rows.
std::vector<BinBoundCheck> error_bound_check(const TKHist1D& hist, double epsilon);

}  // namespace tkhist
