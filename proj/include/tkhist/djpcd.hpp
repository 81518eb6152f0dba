#pragma once

#include <map>
#include <string>
#include <vector>

#include "tkhist/correlation.hpp"
#include "tkhist/pipeline.hpp"
#include "tkhist/query.hpp"
#include "tkhist/state.hpp"

namespace tkhist {

// Query whose aliases are the table names of the template's edges.
Query template_query(const JoinTemplate& join_template);

// Offline phase: runs every template as a pure join, keeps the dominant keys of each key domain
// (at most `cap`, largest estimated contribution first) and records, per table and attribute,
// the attribute values seen with each dominant key.
CorrelationMap discover_correlations(const State& state, const std::vector<JoinTemplate>& templates,
                                     const std::map<std::string, TableData>& tables, std::size_t cap = 1000);

// Online phase: a dominant key is excluded when none of its recorded attribute values can satisfy
// a predicate of the query. With min_only only the smallest recorded value is tested.
ExclusionSet find_excluded_keys(const Query& query, const CorrelationMap& correlations, bool min_only = false);

// Pipeline estimate of a resolved join query with the exclusions applied.
double estimate_with_djpcd(const Query& query, const SubQueryPlan& plan, const State& state,
                           const PipelineOptions& options, bool min_only = false);

}  // namespace tkhist
