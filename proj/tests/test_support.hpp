#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tkhist/catalog.hpp"
#include "tkhist/predicate.hpp"
#include "tkhist/query.hpp"

namespace tkhist::testing {

inline ColumnData nullable_column(const std::vector<std::optional<KeyValue>>& values) {
  ColumnData column(ValueKind::kInteger);
  for (const auto& value : values) {
    if (value) {
      column.push_integer(*value);
    } else {
      column.push_null();
    }
  }
  return column;
}

inline ColumnData int_column(const std::vector<KeyValue>& values) {
  ColumnData column(ValueKind::kInteger);
  for (const auto value : values) {
    column.push_integer(value);
  }
  return column;
}

inline ColumnData text_column(const std::vector<std::string>& values) {
  ColumnData column(ValueKind::kCategorical);
  for (const auto& value : values) {
    column.push_text(value);
  }
  return column;
}

inline TableData make_table(const std::string& name, std::vector<std::pair<std::string, ColumnData>> columns) {
  TableData table;
  table.name = name;
  table.row_count = columns.empty() ? 0 : columns.front().second.size();
  for (auto& [column_name, data] : columns) {
    table.column_names.push_back(column_name);
    table.columns.push_back(std::move(data));
  }
  return table;
}

// Table definition matching make_table output; the first listed key columns are keys.
inline TableDef make_def(const TableData& table, std::initializer_list<std::string> keys) {
  TableDef def;
  def.name = table.name;
  def.source = table.name + ".csv";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    const auto& name = table.column_names[i];
    bool is_key = false;
    for (const auto& key : keys) {
      is_key = is_key || key == name;
    }
    def.columns.push_back(ColumnDef{name, table.columns[i].kind(), is_key ? ColumnRole::kKey : ColumnRole::kAttribute,
                                    false});
  }
  return def;
}

// Reference cardinality by nested loops over every alias, written without hashing or tree
// traversal so it can cross-check the hash-join oracle.
class NestedLoopJoin {
 public:
  NestedLoopJoin(const Query& query, const std::map<std::string, TableData>& tables) : query_(query) {
    for (const auto& ref : query.tables) {
      data_.push_back(&tables.at(ref.table));
    }
    rows_.resize(query.tables.size());
  }

  std::uint64_t count() { return descend(0); }

 private:
  std::size_t index_of(const std::string& alias) const {
    for (std::size_t i = 0; i < query_.tables.size(); ++i) {
      if (query_.tables[i].alias == alias) {
        return i;
      }
    }
    return query_.tables.size();
  }

  bool consistent(std::size_t depth) const {
    const auto& alias = query_.tables[depth].alias;
    const auto row = rows_[depth];
    for (const auto& predicate : query_.predicates) {
      if (predicate.column.table == alias &&
          !matches(predicate, data_[depth]->column(predicate.column.column), row)) {
        return false;
      }
    }
    for (const auto& edge : query_.joins) {
      const auto left = index_of(edge.left.table);
      const auto right = index_of(edge.right.table);
      if (std::max(left, right) != depth) {
        continue;
      }
      const auto& a = data_[left]->column(edge.left.column);
      const auto& b = data_[right]->column(edge.right.column);
      if (a.is_null(rows_[left]) || b.is_null(rows_[right]) || a.integer(rows_[left]) != b.integer(rows_[right])) {
        return false;
      }
    }
    return true;
  }

  std::uint64_t descend(std::size_t depth) {
    if (depth == query_.tables.size()) {
      return 1;
    }
    std::uint64_t total = 0;
    for (std::size_t row = 0; row < data_[depth]->row_count; ++row) {
      rows_[depth] = row;
      if (consistent(depth)) {
        total += descend(depth + 1);
      }
    }
    return total;
  }

  const Query& query_;
  std::vector<const TableData*> data_;
  std::vector<std::size_t> rows_;
};

inline std::uint64_t nested_loop_count(const Query& query, const std::map<std::string, TableData>& tables) {
  return NestedLoopJoin(query, tables).count();
}

// Fresh directory under the system temp directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix) {
    std::random_device device;
    path_ = std::filesystem::temp_directory_path() / (prefix + "-" + std::to_string(device()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ignored;
    std::filesystem::remove_all(path_, ignored);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace tkhist::testing
