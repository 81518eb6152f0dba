#pragma once

#include <span>

namespace tkhist {

// max(est, truth) / min(est, truth). A zero estimate with positive truth gives +infinity.
// Throws when truth is not positive.
double q_error(double estimate, double truth);
// estimate / truth; above 1 means over-estimation. Throws when truth is not positive.
double ratio(double estimate, double truth);

// Linear interpolation between closest ranks; q in [0, 1]. Throws on empty input.
double percentile(std::span<const double> values, double q);

struct QErrorSummary {
  std::size_t count = 0;
  double median = 0.0;
  double p90 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
};

// Empty input yields a summary with count 0.
QErrorSummary summarize(std::span<const double> q_errors);

}  // namespace tkhist
