#include "tkhist/builder.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "tkhist/djpcd.hpp"
#include "tkhist/error.hpp"

namespace tkhist {

std::map<std::string, TableData> ingest_all(const Schema& schema) {
  std::map<std::string, TableData> tables;
  for (const auto& def : schema.tables) {
    tables.emplace(def.name, ingest_table(def, schema));
  }
  return tables;
}

std::vector<JoinTemplate> default_templates(const Schema& schema) {
  std::map<std::string, std::string> parent;
  std::function<std::string(const std::string&)> find = [&](const std::string& table) -> std::string {
    auto it = parent.try_emplace(table, table).first;
    return it->second == table ? table : find(it->second);
  };
  std::vector<JoinEdge> accepted;
  for (const auto& fk : schema.foreign_keys) {
    const auto a = find(fk.from.table);
    const auto b = find(fk.to.table);
    if (a == b) {
      continue;
    }
    parent[std::max(a, b)] = std::min(a, b);
    accepted.push_back(make_edge(fk.from, fk.to));
  }
  std::map<std::string, JoinTemplate> by_component;
  for (const auto& edge : accepted) {
    by_component[find(edge.left.table)].push_back(edge);
  }
  std::vector<JoinTemplate> templates;
  for (auto& [root, edges] : by_component) {
    std::sort(edges.begin(), edges.end());
    templates.push_back(std::move(edges));
  }
  return templates;
}

State build_state(const Schema& schema, const std::map<std::string, TableData>& tables, const BuildConfig& config) {
  if (config.bin_count == 0) {
    throw Error("bin count must be at least 1");
  }
  State state;
  state.config = config;
  state.schema = schema;
  state.domains = infer_key_domains(schema);

  for (auto& domain : state.domains) {
    bool any = false;
    KeyValue lo = 0;
    KeyValue hi = 0;
    for (const auto& member : domain.members) {
      const auto it = tables.find(member.table);
      if (it == tables.end()) {
        throw Error("no data for table '" + member.table + "'");
      }
      const auto& column = it->second.column(member.column);
      for (std::size_t row = 0; row < column.size(); ++row) {
        if (column.is_null(row)) {
          continue;
        }
        const auto value = column.integer(row);
        lo = any ? std::min(lo, value) : value;
        hi = any ? std::max(hi, value) : value;
        any = true;
      }
    }
    domain.set_bounds(lo, hi, config.bin_count);
  }

  for (const auto& def : schema.tables) {
    const auto it = tables.find(def.name);
    if (it == tables.end()) {
      throw Error("no data for table '" + def.name + "'");
    }
    const auto& data = it->second;
    TableStats stats;
    stats.name = def.name;
    stats.row_count = data.row_count;
    const auto classes = classify_columns(data, def, schema.categorical_threshold);

    std::map<std::string, AttributeBinning> binnings;
    for (const auto& column : def.columns) {
      const auto& values = data.column(column.name);
      const auto* domain = state.domain_of(ColumnRef{def.name, column.name});
      stats.columns[column.name] =
          ColumnStats{column.kind, column.role, classes.at(column.name), values.size() - values.null_count()};
      binnings.emplace(column.name, make_attribute_binning(values, classes.at(column.name), config.bin_count,
                                                           classes.at(column.name) == ColumnClass::kNumeric ? domain
                                                                                                          : nullptr));
      stats.table_hists.emplace(column.name, build_table_level_hist(values, binnings.at(column.name), column.name));
      if (classes.at(column.name) == ColumnClass::kCategorical) {
        stats.frequency_hists.emplace(column.name, build_frequency_hist(values));
      }
    }
    for (const auto& key : def.columns) {
      const auto* domain = state.domain_of(ColumnRef{def.name, key.name});
      if (domain == nullptr) {
        continue;
      }
      const auto& key_values = data.column(key.name);
      stats.key_hists.emplace(key.name, build_tkhist1d(key_values, *domain, config.k));
      for (const auto& other : def.columns) {
        if (other.name == key.name) {
          continue;
        }
        stats.pair_hists.emplace(std::make_pair(key.name, other.name),
                                 build_tkhist2d(key_values, data.column(other.name), *domain, binnings.at(other.name),
                                                key.name, other.name));
      }
    }
    state.tables.emplace(def.name, std::move(stats));
  }

  const auto templates = schema.templates.empty() ? default_templates(schema) : schema.templates;
  state.correlations = discover_correlations(state, templates, tables, config.correlation_cap);
  return state;
}

UpdateResult apply_inserts(State& state, const std::string& table, const TableData& rows) {
  auto stats_it = state.tables.find(table);
  if (stats_it == state.tables.end()) {
    throw Error("no statistics for table '" + table + "'");
  }
  auto& stats = stats_it->second;
  UpdateResult result;
  for (std::size_t row = 0; row < rows.row_count; ++row) {
    std::string problem;
    for (const auto& [column, hist] : stats.key_hists) {
      const auto& values = rows.column(column);
      if (!values.is_null(row) && (values.integer(row) < hist.min_key() || values.integer(row) > hist.max_key())) {
        problem = "row " + std::to_string(row + 1) + ": key " + table + "." + column + " = " +
                  std::to_string(values.integer(row)) + " outside domain " + hist.domain_id() + " [" +
                  std::to_string(hist.min_key()) + ", " + std::to_string(hist.max_key()) + "]";
        break;
      }
    }
    if (!problem.empty()) {
      result.rejected.push_back(std::move(problem));
      continue;
    }
    ++stats.row_count;
    for (auto& [column, column_stats] : stats.columns) {
      if (!rows.column(column).is_null(row)) {
        ++column_stats.non_null;
      }
    }
    for (auto& [column, hist] : stats.key_hists) {
      const auto& values = rows.column(column);
      if (!values.is_null(row)) {
        hist.insert(values.integer(row));
      }
    }
    for (auto& [columns, hist] : stats.pair_hists) {
      const auto& keys = rows.column(columns.first);
      if (!keys.is_null(row)) {
        hist.add_row(keys.integer(row), rows.column(columns.second), row);
      }
    }
    for (auto& [column, hist] : stats.table_hists) {
      hist.add_row(std::nullopt, rows.column(column), row);
    }
    for (auto& [column, hist] : stats.frequency_hists) {
      const auto& values = rows.column(column);
      if (!values.is_null(row)) {
        ++hist.counts[values.label(row)];
      }
    }
    ++result.applied;
  }
  return result;
}

}  // namespace tkhist
