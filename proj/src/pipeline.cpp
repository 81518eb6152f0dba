#include "tkhist/pipeline.hpp"

#include <optional>

#include "tkhist/error.hpp"
#include "tkhist/predicate.hpp"

namespace tkhist {

namespace {

class PipelineRun {
 public:
  PipelineRun(const Query& query, const SubQueryPlan& plan, const State& state, const ExclusionSet& excluded,
              const PipelineOptions& options, std::vector<GroupTrace>* trace)
      : query_(query), plan_(plan), state_(state), excluded_(excluded), options_(options), trace_(trace) {}

  double run() {
    if (plan_.groups.empty()) {
      throw Error("query has no joins to estimate");
    }
    return join_group(0, std::nullopt).total();
  }

 private:
  struct GivenMember {
    std::string alias;
    CompositeHist hist;
  };

  const TableStats& stats_of(const std::string& alias) const { return state_.table(query_.table_of(alias)); }

  const std::string& column_in(std::size_t group, const std::string& alias) const {
    return plan_.member(group, alias)->column;
  }

  CompositeHist filtered_lift(const std::string& alias, const std::string& column) const {
    const auto& stats = stats_of(alias);
    auto composite = lift(stats.key_hist(column), alias);
    if (!options_.apply_predicates) {
      return composite;
    }
    std::vector<BinSelectivity> fractions;
    for (const auto& predicate : query_.predicates) {
      if (predicate.column.table != alias) {
        continue;
      }
      if (predicate.column.column == column) {
        composite = restrict_key(composite, predicate);
      } else {
        fractions.push_back(selectivity_2d(stats.pair_hist(column, predicate.column.column), predicate));
      }
    }
    if (!fractions.empty()) {
      composite = apply_filters(composite, combine_table_selectivity(fractions), options_.scale_dominant);
    }
    return composite;
  }

  CompositeHist translate(const CompositeHist& composite, const std::string& alias, const std::string& from,
                          const std::string& to) const {
    const auto& stats = stats_of(alias);
    return chain_translate(composite, stats.pair_hist(from, to), stats.key_hist(to));
  }

  // Histogram standing for `alias` inside `group`, including every subtree hanging off the
  // alias through its other groups.
  CompositeHist member_for(const std::string& alias, std::size_t group) {
    std::vector<std::size_t> others;
    for (const auto g : plan_.groups_of(alias)) {
      if (g != group) {
        others.push_back(g);
      }
    }
    if (others.empty()) {
      return filtered_lift(alias, column_in(group, alias));
    }
    std::optional<CompositeHist> current;
    std::string current_column;
    for (const auto other : others) {
      const auto& column = column_in(other, alias);
      auto own = current ? translate(*current, alias, current_column, column) : filtered_lift(alias, column);
      current = join_group(other, GivenMember{alias, std::move(own)});
      current_column = column;
    }
    return translate(*current, alias, current_column, column_in(group, alias));
  }

  CompositeHist join_group(std::size_t group, std::optional<GivenMember> given) {
    const auto& star = plan_.groups[group];
    std::vector<CompositeHist> parts;
    parts.reserve(star.members.size());
    for (const auto& member : star.members) {
      if (given && member.alias == given->alias) {
        parts.push_back(std::move(given->hist));
      } else {
        parts.push_back(member_for(member.alias, group));
      }
    }
    static const KeySet kNone;
    const auto it = excluded_.find(star.domain_id);
    auto result = join_star_group(parts, it == excluded_.end() ? kNone : it->second);
    if (trace_ != nullptr) {
      trace_->push_back(GroupTrace{group, result});
    }
    return result;
  }

  const Query& query_;
  const SubQueryPlan& plan_;
  const State& state_;
  const ExclusionSet& excluded_;
  const PipelineOptions& options_;
  std::vector<GroupTrace>* trace_;
};

}  // namespace

double run_pipeline(const Query& query, const SubQueryPlan& plan, const State& state, const ExclusionSet& excluded,
                    const PipelineOptions& options, std::vector<GroupTrace>* trace) {
  return PipelineRun(query, plan, state, excluded, options, trace).run();
}

double estimate_pure_join(const Query& query, const SubQueryPlan& plan, const State& state) {
  if (query.joins.empty()) {
    return estimate_single_table(query, state, false);
  }
  return run_pipeline(query, plan, state, {}, PipelineOptions{false, false});
}

double estimate_single_table(const Query& query, const State& state, bool apply_predicates) {
  if (query.tables.size() != 1) {
    throw Error("single-table estimation needs exactly one table");
  }
  const auto& stats = state.table(query.tables.front().table);
  double estimate = static_cast<double>(stats.row_count);
  if (!apply_predicates || stats.row_count == 0) {
    return estimate;
  }
  for (const auto& predicate : query.predicates) {
    const auto& column = predicate.column.column;
    const auto& column_stats = stats.columns.at(column);
    if (column_stats.column_class == ColumnClass::kCategorical && stats.frequency_hists.contains(column) &&
        (predicate.op == CompareOp::kEq || predicate.op == CompareOp::kIn || column_stats.kind == ValueKind::kCategorical)) {
      estimate *= selectivity_categorical(stats.frequency_hists.at(column), predicate, stats.row_count);
    } else {
      const auto it = stats.table_hists.find(column);
      if (it == stats.table_hists.end()) {
        throw Error("missing table-level histogram for " + stats.name + "." + column);
      }
      estimate *= selectivity_2d(it->second, predicate).front();
    }
  }
  return estimate;
}

}  // namespace tkhist
