#include "tkhist/oracle.hpp"

#include <unordered_map>
#include <vector>

#include "tkhist/error.hpp"
#include "tkhist/predicate.hpp"

namespace tkhist {

namespace {

struct Neighbor {
  std::size_t alias = 0;
  std::string own_column;
  std::string other_column;
};

class OracleRun {
 public:
  OracleRun(const Query& query, const std::map<std::string, TableData>& tables, std::uint64_t cap)
      : query_(query), cap_(cap) {
    for (std::size_t i = 0; i < query.tables.size(); ++i) {
      index_[query.tables[i].alias] = i;
      const auto it = tables.find(query.tables[i].table);
      if (it == tables.end()) {
        throw Error("no data for table '" + query.tables[i].table + "'");
      }
      data_.push_back(&it->second);
    }
    neighbors_.resize(query.tables.size());
    for (const auto& edge : query.joins) {
      const auto a = index_.at(edge.left.table);
      const auto b = index_.at(edge.right.table);
      neighbors_[a].push_back({b, edge.left.column, edge.right.column});
      neighbors_[b].push_back({a, edge.right.column, edge.left.column});
    }
    rows_.resize(query.tables.size());
    for (std::size_t i = 0; i < query.tables.size(); ++i) {
      const auto& data = *data_[i];
      for (std::size_t row = 0; row < data.row_count; ++row) {
        bool keep = true;
        for (const auto& predicate : query.predicates) {
          if (predicate.column.table == query.tables[i].alias &&
              !matches(predicate, data.column(predicate.column.column), row)) {
            keep = false;
            break;
          }
        }
        if (keep) {
          rows_[i].push_back(row);
        }
      }
    }
  }

  std::uint64_t count() {
    if (query_.tables.empty()) {
      return 0;
    }
    if (query_.joins.size() + 1 != query_.tables.size()) {
      throw Error("disconnected join graph");
    }
    const auto weights = subtree_weights(0, query_.tables.size());
    std::uint64_t total = 0;
    for (const auto w : weights) {
      total = add(total, w);
    }
    return total;
  }

 private:
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t sum = 0;
    if (__builtin_add_overflow(a, b, &sum) || sum > cap_) {
      throw CapExceededError("oracle cap exceeded");
    }
    return sum;
  }

  std::uint64_t multiply(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t product = 0;
    if (__builtin_mul_overflow(a, b, &product) || product > cap_) {
      throw CapExceededError("oracle cap exceeded");
    }
    return product;
  }

  // Number of partial join results of the subtree rooted at `node` per surviving row of `node`.
  std::vector<std::uint64_t> subtree_weights(std::size_t node, std::size_t parent) {
    const auto& data = *data_[node];
    std::vector<std::uint64_t> weights(rows_[node].size(), 1);
    for (const auto& neighbor : neighbors_[node]) {
      if (neighbor.alias == parent) {
        continue;
      }
      const auto child_weights = subtree_weights(neighbor.alias, node);
      const auto& child_data = *data_[neighbor.alias];
      const auto& child_keys = child_data.column(neighbor.other_column);
      std::unordered_map<KeyValue, std::uint64_t> message;
      for (std::size_t i = 0; i < rows_[neighbor.alias].size(); ++i) {
        const auto row = rows_[neighbor.alias][i];
        if (!child_keys.is_null(row) && child_weights[i] > 0) {
          auto& slot = message[child_keys.integer(row)];
          slot = add(slot, child_weights[i]);
        }
      }
      const auto& own_keys = data.column(neighbor.own_column);
      for (std::size_t i = 0; i < rows_[node].size(); ++i) {
        const auto row = rows_[node][i];
        if (weights[i] == 0) {
          continue;
        }
        if (own_keys.is_null(row)) {
          weights[i] = 0;
          continue;
        }
        const auto it = message.find(own_keys.integer(row));
        weights[i] = it == message.end() ? 0 : multiply(weights[i], it->second);
      }
    }
    std::uint64_t subtree_total = 0;
    for (const auto w : weights) {
      subtree_total = add(subtree_total, w);
    }
    return weights;
  }

  const Query& query_;
  std::uint64_t cap_;
  std::map<std::string, std::size_t> index_;
  std::vector<const TableData*> data_;
  std::vector<std::vector<Neighbor>> neighbors_;
  std::vector<std::vector<std::size_t>> rows_;
};

}  // namespace

std::uint64_t oracle_count(const Query& query, const std::map<std::string, TableData>& tables, std::uint64_t cap) {
  OracleRun run(query, tables, cap);
  return run.count();
}

}  // namespace tkhist
