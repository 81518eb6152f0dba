#pragma once

#include <vector>

#include "tkhist/correlation.hpp"
#include "tkhist/join.hpp"
#include "tkhist/query.hpp"
#include "tkhist/state.hpp"

namespace tkhist {

struct PipelineOptions {
  bool apply_predicates = true;
  bool scale_dominant = false;
};

// Composite produced for one star group during a run.
struct GroupTrace {
  std::size_t group = 0;
  CompositeHist composite;
};

// Estimates a resolved, decomposed join query: star groups are folded with JTKH and joined to
// their parent groups through chain translation over bridge tables.
double run_pipeline(const Query& query, const SubQueryPlan& plan, const State& state, const ExclusionSet& excluded,
                    const PipelineOptions& options, std::vector<GroupTrace>* trace = nullptr);

// Pipeline estimate with every predicate ignored.
double estimate_pure_join(const Query& query, const SubQueryPlan& plan, const State& state);

// Queries without joins: row count scaled by the table-level predicate selectivities.
double estimate_single_table(const Query& query, const State& state, bool apply_predicates);

}  // namespace tkhist
