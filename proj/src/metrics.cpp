#include "tkhist/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tkhist/error.hpp"

namespace tkhist {

namespace {

void check_truth(double truth) {
  if (!(truth > 0.0)) {
    throw Error("undefined truth: true cardinality must be positive");
  }
}

}  // namespace

double q_error(double estimate, double truth) {
  check_truth(truth);
  if (estimate < 0.0 || std::isnan(estimate)) {
    throw Error("estimate must be non-negative");
  }
  if (estimate == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return std::max(estimate, truth) / std::min(estimate, truth);
}

double ratio(double estimate, double truth) {
  check_truth(truth);
  return estimate / truth;
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) {
    throw Error("percentile of an empty sample");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double position = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(position));
  const auto upper = std::min(lower + 1, sorted.size() - 1);
  const double fraction = position - static_cast<double>(lower);
  if (fraction == 0.0 || std::isinf(sorted[upper])) {
    return fraction == 0.0 ? sorted[lower] : sorted[upper];
  }
  return sorted[lower] + fraction * (sorted[upper] - sorted[lower]);
}

QErrorSummary summarize(std::span<const double> q_errors) {
  QErrorSummary summary;
  summary.count = q_errors.size();
  if (q_errors.empty()) {
    return summary;
  }
  summary.median = percentile(q_errors, 0.5);
  summary.p90 = percentile(q_errors, 0.9);
  summary.p95 = percentile(q_errors, 0.95);
  summary.p99 = percentile(q_errors, 0.99);
  summary.max = *std::max_element(q_errors.begin(), q_errors.end());
  return summary;
}

}  // namespace tkhist
