#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "tkhist/catalog.hpp"
#include "tkhist/query.hpp"

namespace tkhist {

inline constexpr std::uint64_t kDefaultOracleCap = 100'000'000;

// Exact cardinality of a resolved, acyclic query by hash-join execution with predicate filtering.
// Null keys never match. Throws CapExceededError when any partial join exceeds `cap` tuples.
std::uint64_t oracle_count(const Query& query, const std::map<std::string, TableData>& tables,
                           std::uint64_t cap = kDefaultOracleCap);

}  // namespace tkhist
