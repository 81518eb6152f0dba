#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tkhist/builder.hpp"
#include "tkhist/error.hpp"
#include "tkhist/state.hpp"
#include "tkhist/synthetic.hpp"
#include "tkhist/workload.hpp"

namespace tkhist::cli {

namespace {

// Writes to the file named by `path`, or to stdout when it is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) {
        throw Error("cannot write '" + path + "'");
      }
    }
  }

  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

Schema load_run_schema(const RunConfig& config) {
  if (config.schema_path.empty()) {
    throw Error("--schema is required");
  }
  auto schema = load_schema(config.schema_path);
  if (config.threshold) {
    schema.categorical_threshold = *config.threshold;
  }
  validate_schema(schema);
  return schema;
}

EvaluateOptions evaluate_options(const RunConfig& config, const std::map<std::string, TableData>* tables) {
  EvaluateOptions options;
  options.estimate.djpcd = config.djpcd;
  options.oracle_tables = tables;
  options.oracle_cap = config.oracle_cap;
  return options;
}

}  // namespace

int cmd_build(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto schema = load_run_schema(config);
  const auto tables = ingest_all(schema);
  const auto state = build_state(schema, tables, BuildConfig{config.bins, config.k, config.correlation_cap});
  save_state(state, config.state_path);
  const auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "state written to " << config.state_path << "\n"
            << "build time: " << seconds << " s\n"
            << "state size: " << std::filesystem::file_size(config.state_path) << " bytes\n";
  return 0;
}

int cmd_estimate(const RunConfig& config, const EstimateArgs& args) {
  if (args.query.empty() == args.workload.empty()) {
    throw Error("give exactly one of --query or --workload");
  }
  const auto state = load_state(config.state_path);
  std::vector<WorkloadEntry> entries;
  if (!args.query.empty()) {
    entries.push_back(WorkloadEntry{1, args.query, std::nullopt});
  } else {
    entries = load_workload(args.workload);
  }
  Output out(config.out);
  for (const auto& record : evaluate_workload(entries, state, evaluate_options(config, nullptr))) {
    out.stream() << record.to_json().dump() << '\n';
  }
  return 0;
}

int cmd_evaluate(const RunConfig& config, const EvaluateArgs& args) {
  const auto state = load_state(config.state_path);
  const auto entries = load_workload(args.workload);
  std::map<std::string, TableData> tables;
  if (config.oracle && !entries.empty()) {
    tables = ingest_all(state.schema);
  }
  const auto records = evaluate_workload(entries, state, evaluate_options(config, config.oracle ? &tables : nullptr));
  if (!args.reports.empty()) {
    Output reports(args.reports);
    for (const auto& record : records) {
      reports.stream() << record.to_json().dump() << '\n';
    }
  }
  for (const auto& record : records) {
    if (!record.report) {
      std::cerr << "line " << record.line << ": " << record.error << '\n';
    } else if (record.skipped) {
      std::cerr << "line " << record.line << ": oracle cap exceeded, skipped\n";
    }
  }
  Output out(config.out);
  write_summary_header(out.stream(), false);
  write_summary_row(out.stream(), summarize_records(records), std::filesystem::file_size(config.state_path));
  return 0;
}

int cmd_update(const RunConfig& config, const UpdateArgs& args) {
  auto state = load_state(config.state_path);
  const auto& def = state.schema.table(args.table);
  std::ifstream in(args.rows, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + args.rows + "'");
  }
  const auto rows = read_table_csv(def, in);
  const auto result = apply_inserts(state, args.table, rows);
  save_state(state, config.state_path);
  for (const auto& rejection : result.rejected) {
    std::cerr << "rejected " << rejection << '\n';
  }
  std::cout << "applied " << result.applied << " rows, rejected " << result.rejected.size() << '\n';
  return 0;
}

int cmd_sweep(const RunConfig& config, const SweepArgs& args) {
  const auto schema = load_run_schema(config);
  const auto tables = ingest_all(schema);
  SweepOptions options;
  options.bins = args.bins;
  options.ks = args.ks;
  options.correlation_cap = config.correlation_cap;
  options.evaluate = evaluate_options(config, config.oracle ? &tables : nullptr);
  Output out(config.out);
  std::ofstream raw_file;
  std::ostringstream discard;
  if (!args.raw.empty()) {
    raw_file.open(args.raw, std::ios::binary);
    if (!raw_file) {
      throw Error("cannot write '" + args.raw + "'");
    }
  }
  std::ostream& raw = args.raw.empty() ? static_cast<std::ostream&>(discard) : raw_file;
  run_sweep(schema, tables, load_workload(args.workload), options, out.stream(), raw);
  return 0;
}

int cmd_generate(const RunConfig& config, const GenerateArgs& args) {
  if (config.out.empty()) {
    throw Error("--out directory is required");
  }
  SyntheticSpec spec;
  spec.layout = parse_layout(args.layout);
  spec.table_count = args.tables;
  spec.rows = args.rows;
  spec.skew = args.skew;
  spec.correlated = args.correlated;
  auto dataset = generate_synthetic(spec, config.seed);
  const std::filesystem::path dir(config.out);
  write_dataset(dataset, dir);
  std::ofstream workload(dir / "workload.sql", std::ios::binary);
  workload << "-- pure joins\n";
  for (const auto& sql : pure_join_workload(dataset.schema)) {
    workload << sql << '\n';
  }
  if (spec.correlated && spec.layout == SyntheticLayout::kStar) {
    workload << "-- correlated filters\n";
    for (const auto& sql : correlated_workload(dataset.schema, {10, 20, 50, 100})) {
      workload << sql << '\n';
    }
  }
  std::cout << "wrote " << dataset.tables.size() << " tables to " << dir.string() << '\n';
  return 0;
}

}  // namespace tkhist::cli
