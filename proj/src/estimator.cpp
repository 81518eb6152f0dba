#include "tkhist/estimator.hpp"

#include <chrono>
#include <cmath>

#include "tkhist/djpcd.hpp"
#include "tkhist/error.hpp"
#include "tkhist/metrics.hpp"
#include "tkhist/pipeline.hpp"
#include "tkhist/query.hpp"

namespace tkhist {

namespace {

nlohmann::json number_or_sentinel(double value) {
  if (std::isinf(value)) {
    return "inf";
  }
  return value;
}

}  // namespace

nlohmann::json EstimationReport::to_json() const {
  nlohmann::json out;
  out["query"] = query;
  out["estimate"] = estimate;
  out["true_cardinality"] = truth ? nlohmann::json(*truth) : nlohmann::json(nullptr);
  out["q_error"] = q_error ? number_or_sentinel(*q_error) : nlohmann::json(nullptr);
  out["ratio"] = ratio ? nlohmann::json(*ratio) : nlohmann::json(nullptr);
  out["latency_ms"] = latency_ms;
  return out;
}

void attach_truth(EstimationReport& report, std::uint64_t truth) {
  report.truth = truth;
  if (truth > 0) {
    report.q_error = q_error(report.estimate, static_cast<double>(truth));
    report.ratio = ratio(report.estimate, static_cast<double>(truth));
  }
}

double estimate_resolved(const Query& query, const State& state, const EstimateOptions& options) {
  if (query.joins.empty()) {
    if (query.tables.size() != 1) {
      throw Error("disconnected join graph");
    }
    return estimate_single_table(query, state, true);
  }
  const auto plan = decompose(query, state.domains);
  const PipelineOptions pipeline_options{true, options.scale_dominant};
  if (options.djpcd) {
    return estimate_with_djpcd(query, plan, state, pipeline_options, options.min_only);
  }
  return run_pipeline(query, plan, state, {}, pipeline_options);
}

EstimationReport estimate(const std::string& sql, const State& state, const EstimateOptions& options) {
  if (!state.built()) {
    throw Error("state not built");
  }
  EstimationReport report;
  report.query = sql;
  const auto start = std::chrono::steady_clock::now();
  auto query = parse_sql(sql);
  resolve_query(query, state.schema);
  validate_acyclic(query);
  report.estimate = std::round(estimate_resolved(query, state, options));
  const auto stop = std::chrono::steady_clock::now();
  report.latency_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return report;
}

std::vector<BinBoundCheck> error_bound_check(const TKHist1D& hist, double epsilon) {
  if (hist.bin_count() == 0 || hist.total_rows() == 0) {
    throw Error("empty histogram");
  }
  const double root_n = std::sqrt(static_cast<double>(hist.bin_count()));
  std::vector<BinBoundCheck> report;
  report.reserve(hist.bin_count());
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    const auto& bin = hist.bin(i);
    BinBoundCheck check;
    check.bin = i;
    if (bin.total() > 0) {
      check.value = root_n * bin.bac() * static_cast<double>(bin.ndv()) / static_cast<double>(bin.total());
    }
    check.pass = check.value < epsilon;
    report.push_back(check);
  }
  return report;
}

}  // namespace tkhist
