#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace tkhist::cli;
  CLI::App app{"Top-k histogram join cardinality estimator"};
  app.require_subcommand(1);

  RunConfig config;
  if (const char* env = std::getenv("TKHIST_STATE"); env != nullptr && *env != '\0') {
    config.state_path = env;
  }
  auto add_state = [&](CLI::App* command) {
    command->add_option("--state", config.state_path, "State file (default: $TKHIST_STATE or tkhist.state)");
  };
  auto add_build_flags = [&](CLI::App* command) {
    command->add_option("--schema", config.schema_path, "Schema JSON file")->required();
    command->add_option("--bins", config.bins, "Equi-width bins per key domain")->check(CLI::PositiveNumber);
    command->add_option("--k", config.k, "Top-k container size per bin")->check(CLI::NonNegativeNumber);
    command->add_option("--threshold", config.threshold, "Distinct-count threshold for categorical columns");
    command->add_option("--correlation-cap", config.correlation_cap, "Dominant keys kept per key domain");
  };
  auto add_estimate_flags = [&](CLI::App* command) {
    command->add_flag("--djpcd,!--no-djpcd", config.djpcd, "Exclude dominant keys incompatible with predicates");
    command->add_option("--out", config.out, "Output file (default: stdout)");
  };
  auto add_oracle_flags = [&](CLI::App* command) {
    command->add_flag("--oracle", config.oracle, "Compute missing true cardinalities by executing the query");
    command->add_option("--oracle-cap", config.oracle_cap, "Largest partial join the oracle may produce");
  };

  auto* build = app.add_subcommand("build", "Build the statistics state from a schema and its CSV files");
  add_build_flags(build);
  add_state(build);

  EstimateArgs estimate_args;
  auto* estimate = app.add_subcommand("estimate", "Estimate one query or every query of a workload");
  add_state(estimate);
  add_estimate_flags(estimate);
  auto* query_option = estimate->add_option("--query", estimate_args.query, "SQL text");
  estimate->add_option("--workload", estimate_args.workload, "Workload file")->excludes(query_option);

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand("evaluate", "Summarize q-errors of a workload as CSV");
  add_state(evaluate);
  add_estimate_flags(evaluate);
  add_oracle_flags(evaluate);
  evaluate->add_option("--workload", evaluate_args.workload, "Workload file")->required();
  evaluate->add_option("--reports", evaluate_args.reports, "Also write JSON-lines reports here");

  UpdateArgs update_args;
  auto* update = app.add_subcommand("update", "Insert new rows into an existing state");
  add_state(update);
  update->add_option("--table", update_args.table, "Target table")->required();
  update->add_option("--rows", update_args.rows, "CSV file of new rows")->required();

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Evaluate a workload over a grid of bin counts and k values");
  add_build_flags(sweep);
  add_estimate_flags(sweep);
  add_oracle_flags(sweep);
  sweep->add_option("--workload", sweep_args.workload, "Workload file")->required();
  sweep->add_option("--bins-grid", sweep_args.bins, "Bin counts to try")->delimiter(',');
  sweep->add_option("--k-grid", sweep_args.ks, "k values to try")->delimiter(',');
  sweep->add_option("--raw", sweep_args.raw, "Per-query rows CSV");

  GenerateArgs generate_args;
  auto* generate = app.add_subcommand("generate", "Write a synthetic Zipf dataset, schema and workload");
  generate->add_option("--layout", generate_args.layout, "star, chain or chain_star")
      ->check(CLI::IsMember({"star", "chain", "chain_star"}));
  generate->add_option("--tables", generate_args.tables, "Number of tables");
  generate->add_option("--rows", generate_args.rows, "Rows per table");
  generate->add_option("--skew", generate_args.skew, "Zipf skew")->check(CLI::NonNegativeNumber);
  generate->add_flag("--correlated", generate_args.correlated, "Correlate attribute y with key popularity");
  generate->add_option("--seed", config.seed, "Random seed");
  generate->add_option("--out", config.out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      return cmd_build(config);
    }
    if (estimate->parsed()) {
      return cmd_estimate(config, estimate_args);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(config, evaluate_args);
    }
    if (update->parsed()) {
      return cmd_update(config, update_args);
    }
    if (sweep->parsed()) {
      return cmd_sweep(config, sweep_args);
    }
    if (generate->parsed()) {
      return cmd_generate(config, generate_args);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
