#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tkhist/catalog.hpp"
#include "tkhist/predicate.hpp"

namespace tkhist {

struct TableRef {
  std::string table;
  std::string alias;

  bool operator==(const TableRef&) const = default;
};

// A conjunctive COUNT(*) query. Join edges and predicates refer to aliases.
struct Query {
  std::string text;
  std::vector<TableRef> tables;
  std::vector<JoinEdge> joins;
  std::vector<Predicate> predicates;

  const TableRef* find_alias(std::string_view alias) const;
  const std::string& table_of(std::string_view alias) const;
  // Resolves an alias-qualified column to its table-qualified form.
  ColumnRef base_column(const ColumnRef& aliased) const;
};

// Accepts SELECT COUNT(*) FROM t [AS a], ... [WHERE c1 AND c2 ...] with implicit joins.
Query parse_sql(std::string_view text);
std::string to_sql(const Query& query);

// Qualifies bare column names, checks tables, columns and literal kinds against the schema.
void resolve_query(Query& query, const Schema& schema);

// Throws if the join multigraph over the query's aliases has a cycle.
void validate_acyclic(const Query& query);

struct GroupMember {
  std::string alias;
  std::string column;

  auto operator<=>(const GroupMember&) const = default;
};

// Tables joined on one key domain.
struct StarGroup {
  std::string domain_id;
  std::vector<GroupMember> members;  // ordered by alias
  std::vector<std::size_t> edges;    // indices into Query::joins
};

// A table present in two groups, connecting them through its two key columns.
struct ChainLink {
  std::size_t from_group = 0;
  std::string bridge_alias;
  std::size_t to_group = 0;
};

struct SubQueryPlan {
  std::vector<StarGroup> groups;
  std::vector<ChainLink> links;
  std::vector<std::string> aliases;  // every query alias, sorted

  std::vector<std::size_t> groups_of(std::string_view alias) const;
  const GroupMember* member(std::size_t group, std::string_view alias) const;
};

SubQueryPlan decompose(const Query& query, const std::vector<KeyDomain>& domains);

}  // namespace tkhist
