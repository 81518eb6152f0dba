#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tkhist::cli {

struct RunConfig {
  std::string schema_path;
  std::string state_path = "tkhist.state";
  std::size_t bins = 200;
  std::size_t k = 20;
  std::optional<std::size_t> threshold;
  std::size_t correlation_cap = 1000;
  bool djpcd = true;
  bool oracle = false;
  std::uint64_t oracle_cap = 100'000'000;
  std::uint64_t seed = 42;
  std::string out;
};

struct EstimateArgs {
  std::string query;
  std::string workload;
};

struct EvaluateArgs {
  std::string workload;
  std::string reports;
};

struct UpdateArgs {
  std::string table;
  std::string rows;
};

struct SweepArgs {
  std::string workload;
  std::vector<std::size_t> bins{20, 50, 100, 200, 400};
  std::vector<std::size_t> ks{0, 5, 10, 20};
  std::string raw;
};

struct GenerateArgs {
  std::string layout = "star";
  std::size_t tables = 2;
  std::size_t rows = 10'000;
  double skew = 1.2;
  bool correlated = false;
};

// Each command returns the process exit code.
int cmd_build(const RunConfig& config);
int cmd_estimate(const RunConfig& config, const EstimateArgs& args);
int cmd_evaluate(const RunConfig& config, const EvaluateArgs& args);
int cmd_update(const RunConfig& config, const UpdateArgs& args);
int cmd_sweep(const RunConfig& config, const SweepArgs& args);
int cmd_generate(const RunConfig& config, const GenerateArgs& args);

}  // namespace tkhist::cli
