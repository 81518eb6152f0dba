#include "tkhist/workload.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "tkhist/builder.hpp"
#include "tkhist/csv.hpp"
#include "tkhist/error.hpp"
#include "tkhist/query.hpp"

namespace tkhist {

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::string format_number(double value) {
  return std::isinf(value) ? std::string("inf") : format_real(value);
}

}  // namespace

std::vector<WorkloadEntry> parse_workload(std::istream& in) {
  std::vector<WorkloadEntry> entries;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty() || text.starts_with("--")) {
      continue;
    }
    WorkloadEntry entry;
    entry.line = number;
    const auto split = text.rfind("||");
    if (split == std::string::npos) {
      entry.sql = text;
    } else {
      entry.sql = trim(std::string_view(text).substr(0, split));
      const auto truth_text = trim(std::string_view(text).substr(split + 2));
      std::uint64_t truth = 0;
      const auto result = std::from_chars(truth_text.data(), truth_text.data() + truth_text.size(), truth);
      if (result.ec != std::errc() || result.ptr != truth_text.data() + truth_text.size()) {
        throw Error("line " + std::to_string(number) + ": invalid truth '" + truth_text + "'");
      }
      entry.truth = truth;
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<WorkloadEntry> load_workload(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open workload '" + path.string() + "'");
  }
  return parse_workload(in);
}

nlohmann::json WorkloadRecord::to_json() const {
  if (report) {
    auto out = report->to_json();
    out["line"] = line;
    if (skipped) {
      out["oracle"] = "skipped: cap exceeded";
    }
    return out;
  }
  return {{"line", line}, {"error", error}};
}

std::vector<WorkloadRecord> evaluate_workload(const std::vector<WorkloadEntry>& entries, const State& state,
                                              const EvaluateOptions& options) {
  std::vector<WorkloadRecord> records;
  records.reserve(entries.size());
  for (const auto& entry : entries) {
    WorkloadRecord record;
    record.line = entry.line;
    try {
      auto report = estimate(entry.sql, state, options.estimate);
      auto truth = entry.truth;
      if (!truth && options.oracle_tables != nullptr) {
        auto query = parse_sql(entry.sql);
        resolve_query(query, state.schema);
        try {
          truth = oracle_count(query, *options.oracle_tables, options.oracle_cap);
        } catch (const CapExceededError&) {
          record.skipped = true;
        }
      }
      if (truth) {
        attach_truth(report, *truth);
      }
      record.report = std::move(report);
    } catch (const std::exception& e) {
      record.error = e.what();
    }
    records.push_back(std::move(record));
  }
  return records;
}

WorkloadSummary summarize_records(const std::vector<WorkloadRecord>& records) {
  WorkloadSummary summary;
  std::vector<double> q_errors;
  double latency = 0.0;
  for (const auto& record : records) {
    if (!record.report) {
      ++summary.failed;
      continue;
    }
    ++summary.estimated;
    summary.skipped += record.skipped ? 1 : 0;
    latency += record.report->latency_ms;
    if (record.report->q_error) {
      q_errors.push_back(*record.report->q_error);
    }
  }
  summary.q_error = summarize(q_errors);
  summary.mean_latency_ms = summary.estimated > 0 ? latency / static_cast<double>(summary.estimated) : 0.0;
  return summary;
}

void write_summary_header(std::ostream& out, bool with_sweep_columns) {
  std::vector<std::string> header;
  if (with_sweep_columns) {
    header = {"bins", "k"};
  }
  for (const auto* name : {"queries", "median", "p90", "p95", "p99", "max", "mean_latency_ms", "state_bytes",
                           "failed", "skipped"}) {
    header.emplace_back(name);
  }
  csv::write_record(out, header);
}

void write_summary_row(std::ostream& out, const WorkloadSummary& summary, std::uint64_t state_bytes,
                       std::optional<std::pair<std::size_t, std::size_t>> n_and_k) {
  std::vector<std::string> row;
  if (n_and_k) {
    row = {std::to_string(n_and_k->first), std::to_string(n_and_k->second)};
  }
  const auto& q = summary.q_error;
  const bool any = q.count > 0;
  for (const double value : {q.median, q.p90, q.p95, q.p99, q.max}) {
    row.push_back(any ? format_number(value) : std::string());
  }
  row.insert(row.end() - 5, std::to_string(q.count));
  row.push_back(format_real(summary.mean_latency_ms));
  row.push_back(std::to_string(state_bytes));
  row.push_back(std::to_string(summary.failed));
  row.push_back(std::to_string(summary.skipped));
  csv::write_record(out, row);
}

void run_sweep(const Schema& schema, const std::map<std::string, TableData>& tables,
               std::vector<WorkloadEntry> entries, const SweepOptions& options, std::ostream& summary,
               std::ostream& raw) {
  if (options.evaluate.oracle_tables != nullptr) {
    for (auto& entry : entries) {
      if (entry.truth) {
        continue;
      }
      try {
        auto query = parse_sql(entry.sql);
        resolve_query(query, schema);
        entry.truth = oracle_count(query, *options.evaluate.oracle_tables, options.evaluate.oracle_cap);
      } catch (const std::exception&) {
        // Left without truth; the query is reported as it is evaluated.
      }
    }
  }
  EvaluateOptions evaluate = options.evaluate;
  evaluate.oracle_tables = nullptr;

  write_summary_header(summary, true);
  csv::write_record(raw, {"bins", "k", "line", "estimate", "true_cardinality", "q_error", "ratio", "latency_ms",
                          "error"});
  for (const auto bins : options.bins) {
    for (const auto k : options.ks) {
      const auto state = build_state(schema, tables, BuildConfig{bins, k, options.correlation_cap});
      const auto state_bytes = serialize_state(state).size();
      const auto records = evaluate_workload(entries, state, evaluate);
      write_summary_row(summary, summarize_records(records), state_bytes, std::make_pair(bins, k));
      for (const auto& record : records) {
        std::vector<std::string> row{std::to_string(bins), std::to_string(k), std::to_string(record.line)};
        if (record.report) {
          const auto& r = *record.report;
          row.push_back(format_real(r.estimate));
          row.push_back(r.truth ? std::to_string(*r.truth) : std::string());
          row.push_back(r.q_error ? format_number(*r.q_error) : std::string());
          row.push_back(r.ratio ? format_number(*r.ratio) : std::string());
          row.push_back(format_real(r.latency_ms));
          row.emplace_back();
        } else {
          row.insert(row.end(), {"", "", "", "", ""});
          row.push_back(record.error);
        }
        csv::write_record(raw, row);
      }
    }
  }
}

}  // namespace tkhist
