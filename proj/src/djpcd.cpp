#include "tkhist/djpcd.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "tkhist/error.hpp"
#include "tkhist/predicate.hpp"

namespace tkhist {

Query template_query(const JoinTemplate& join_template) {
  Query query;
  std::set<std::string> names;
  for (const auto& edge : join_template) {
    names.insert(edge.left.table);
    names.insert(edge.right.table);
    query.joins.push_back(edge);
  }
  for (const auto& name : names) {
    query.tables.push_back(TableRef{name, name});
  }
  query.text = to_sql(query);
  return query;
}

CorrelationMap discover_correlations(const State& state, const std::vector<JoinTemplate>& templates,
                                     const std::map<std::string, TableData>& tables, std::size_t cap) {
  std::map<std::string, std::map<KeyValue, double>> contribution;
  std::set<std::pair<std::string, ColumnRef>> key_columns;  // (domain, table.column)
  for (const auto& join_template : templates) {
    if (join_template.empty()) {
      continue;
    }
    const auto query = template_query(join_template);
    const auto plan = decompose(query, state.domains);
    std::vector<GroupTrace> trace;
    run_pipeline(query, plan, state, {}, PipelineOptions{false, false}, &trace);
    for (const auto& entry : trace) {
      const auto& group = plan.groups[entry.group];
      auto& per_key = contribution[group.domain_id];
      for (std::size_t i = 0; i < entry.composite.bin_count(); ++i) {
        for (const auto& [key, value] : entry.composite.bin(i).dominant) {
          auto& best = per_key[key];
          best = std::max(best, value);
        }
      }
      for (const auto& member : group.members) {
        key_columns.emplace(group.domain_id, ColumnRef{member.alias, member.column});
      }
    }
  }

  CorrelationMap map;
  std::map<std::string, std::unordered_set<KeyValue>> dominant_sets;
  for (const auto& [domain, per_key] : contribution) {
    std::vector<std::pair<KeyValue, double>> ranked(per_key.begin(), per_key.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > cap) {
      ranked.resize(cap);
    }
    auto& keys = map.dominant_keys[domain];
    for (const auto& [key, value] : ranked) {
      keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    dominant_sets[domain].insert(keys.begin(), keys.end());
  }

  for (const auto& [domain, column] : key_columns) {
    const auto& dominant = dominant_sets[domain];
    if (dominant.empty()) {
      continue;
    }
    const auto table_it = tables.find(column.table);
    if (table_it == tables.end()) {
      throw Error("template references table '" + column.table + "' without data");
    }
    const auto& data = table_it->second;
    const auto& def = state.schema.table(column.table);
    const auto& stats = state.table(column.table);
    const auto& keys = data.column(column.column);
    for (const auto& attribute : def.columns) {
      if (attribute.name == column.column) {
        continue;
      }
      const auto& values = data.column(attribute.name);
      AttributeCorrelation correlation;
      correlation.domain_id = domain;
      correlation.categorical = stats.columns.at(attribute.name).column_class == ColumnClass::kCategorical;
      for (std::size_t row = 0; row < data.row_count; ++row) {
        if (keys.is_null(row) || values.is_null(row) || !dominant.contains(keys.integer(row))) {
          continue;
        }
        const auto key = keys.integer(row);
        if (correlation.categorical) {
          correlation.values[key].insert(values.label(row));
        } else {
          const double value = values.numeric(row);
          auto [it, inserted] = correlation.envelopes.try_emplace(key, Envelope{value, value});
          if (!inserted) {
            it->second.min = std::min(it->second.min, value);
            it->second.max = std::max(it->second.max, value);
          }
        }
      }
      map.entries[CorrelationKey{column.table, column.column, attribute.name}] = std::move(correlation);
    }
  }
  return map;
}

namespace {

bool label_satisfies(const Predicate& predicate, const std::string& label) {
  const bool numeric_operands = std::all_of(predicate.operands.begin(), predicate.operands.end(),
                                            [](const Literal& literal) { return literal.is_number(); });
  if (numeric_operands) {
    double value = 0.0;
    const auto result = std::from_chars(label.data(), label.data() + label.size(), value);
    if (result.ec == std::errc() && result.ptr == label.data() + label.size()) {
      return matches(predicate, value);
    }
  }
  return matches(predicate, label);
}

bool satisfiable(const AttributeCorrelation& correlation, KeyValue key, const Predicate& predicate, bool min_only) {
  if (correlation.categorical) {
    const auto& labels = correlation.values.at(key);
    if (min_only) {
      return label_satisfies(predicate, *labels.begin());
    }
    return std::any_of(labels.begin(), labels.end(),
                       [&](const std::string& label) { return label_satisfies(predicate, label); });
  }
  const auto& envelope = correlation.envelopes.at(key);
  return min_only ? matches(predicate, envelope.min) : intersects(predicate, envelope.min, envelope.max);
}

}  // namespace

ExclusionSet find_excluded_keys(const Query& query, const CorrelationMap& correlations, bool min_only) {
  ExclusionSet excluded;
  if (correlations.empty()) {
    return excluded;
  }
  for (const auto& predicate : query.predicates) {
    const auto& alias = predicate.column.table;
    const auto& table = query.table_of(alias);
    std::set<std::string> join_columns;
    for (const auto& edge : query.joins) {
      for (const auto& side : {edge.left, edge.right}) {
        if (side.table == alias) {
          join_columns.insert(side.column);
        }
      }
    }
    for (const auto& column : join_columns) {
      const auto it = correlations.entries.find(CorrelationKey{table, column, predicate.column.column});
      if (it == correlations.entries.end()) {
        continue;
      }
      const auto& correlation = it->second;
      auto& keys = excluded[correlation.domain_id];
      auto check = [&](KeyValue key) {
        if (!satisfiable(correlation, key, predicate, min_only)) {
          keys.insert(key);
        }
      };
      if (correlation.categorical) {
        for (const auto& [key, labels] : correlation.values) {
          check(key);
        }
      } else {
        for (const auto& [key, envelope] : correlation.envelopes) {
          check(key);
        }
      }
    }
  }
  return excluded;
}

double estimate_with_djpcd(const Query& query, const SubQueryPlan& plan, const State& state,
                           const PipelineOptions& options, bool min_only) {
  const auto excluded = find_excluded_keys(query, state.correlations, min_only);
  return run_pipeline(query, plan, state, excluded, options);
}

}  // namespace tkhist
