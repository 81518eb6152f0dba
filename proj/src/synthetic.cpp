#include "tkhist/synthetic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "tkhist/error.hpp"

namespace tkhist {

namespace {

constexpr int kCategoryCount = 8;
constexpr int kNoiseWidth = 5;

// Inverse-CDF sampler of ranks 0..n-1 with P(r) proportional to 1 / (r + 1)^skew.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double skew) : cdf_(n) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      sum += 1.0 / std::pow(static_cast<double>(r + 1), skew);
      cdf_[r] = sum;
    }
    for (auto& value : cdf_) {
      value /= sum;
    }
  }

  std::size_t sample(std::mt19937_64& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

struct TableShape {
  std::string name;
  bool has_id = false;
  std::vector<std::pair<std::string, std::string>> foreign_keys;  // column -> referenced table
};

std::vector<TableShape> layout_shapes(const SyntheticSpec& spec) {
  std::vector<TableShape> shapes(spec.table_count);
  for (std::size_t i = 0; i < spec.table_count; ++i) {
    shapes[i].name = "t" + std::to_string(i);
  }
  switch (spec.layout) {
    case SyntheticLayout::kStar:
      shapes[0].has_id = true;
      for (std::size_t i = 1; i < spec.table_count; ++i) {
        shapes[i].foreign_keys.emplace_back("k", "t0");
      }
      break;
    case SyntheticLayout::kChain:
      for (std::size_t i = 0; i < spec.table_count; ++i) {
        shapes[i].has_id = i + 1 < spec.table_count;
        if (i > 0) {
          shapes[i].foreign_keys.emplace_back("prev", shapes[i - 1].name);
        }
      }
      break;
    case SyntheticLayout::kChainStar:
      shapes[0].has_id = true;
      shapes[1].foreign_keys.emplace_back("a", "t0");
      shapes[2].has_id = true;
      shapes[2].foreign_keys.emplace_back("a", "t0");
      shapes[3].foreign_keys.emplace_back("b", "t2");
      shapes[4].foreign_keys.emplace_back("b", "t2");
      break;
  }
  return shapes;
}

}  // namespace

std::string_view to_string(SyntheticLayout layout) {
  switch (layout) {
    case SyntheticLayout::kStar:
      return "star";
    case SyntheticLayout::kChain:
      return "chain";
    case SyntheticLayout::kChainStar:
      return "chain_star";
  }
  return "star";
}

SyntheticLayout parse_layout(std::string_view text) {
  if (text == "star") {
    return SyntheticLayout::kStar;
  }
  if (text == "chain") {
    return SyntheticLayout::kChain;
  }
  if (text == "chain_star") {
    return SyntheticLayout::kChainStar;
  }
  throw Error("unknown layout '" + std::string(text) + "'");
}

void validate_spec(const SyntheticSpec& spec) {
  if (spec.rows < 1) {
    throw Error("rows must be at least 1");
  }
  if (!(spec.skew >= 0.0)) {
    throw Error("skew must be non-negative");
  }
  if (spec.table_count < 2) {
    throw Error("at least two tables are required");
  }
  if (spec.layout == SyntheticLayout::kChainStar && spec.table_count != 5) {
    throw Error("the chain_star layout has exactly five tables");
  }
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  std::mt19937_64 rng(seed);
  const ZipfSampler zipf(spec.rows, spec.skew);
  const auto shapes = layout_shapes(spec);

  // Popularity rank -> key, one permutation per referenced table.
  std::map<std::string, std::vector<KeyValue>> rank_to_key;
  for (const auto& shape : shapes) {
    if (shape.has_id) {
      std::vector<KeyValue> keys(spec.rows);
      std::iota(keys.begin(), keys.end(), KeyValue{1});
      std::shuffle(keys.begin(), keys.end(), rng);
      rank_to_key.emplace(shape.name, std::move(keys));
    }
  }

  SyntheticDataset dataset;
  dataset.schema.categorical_threshold = 100;
  for (const auto& shape : shapes) {
    TableDef def;
    def.name = shape.name;
    def.source = shape.name + ".csv";
    TableData data;
    data.name = shape.name;
    data.row_count = spec.rows;
    auto add_column = [&](const std::string& name, ValueKind kind, ColumnRole role) {
      def.columns.push_back(ColumnDef{name, kind, role, false});
      data.column_names.push_back(name);
      data.columns.emplace_back(kind);
    };
    if (shape.has_id) {
      add_column("id", ValueKind::kInteger, ColumnRole::kKey);
      def.primary_key = "id";
    }
    for (const auto& [column, parent] : shape.foreign_keys) {
      add_column(column, ValueKind::kInteger, ColumnRole::kKey);
      dataset.schema.foreign_keys.push_back(ForeignKey{ColumnRef{shape.name, column}, ColumnRef{parent, "id"}});
    }
    add_column("x", ValueKind::kReal, ColumnRole::kAttribute);
    add_column("y", ValueKind::kInteger, ColumnRole::kAttribute);
    add_column("c", ValueKind::kCategorical, ColumnRole::kAttribute);

    std::uniform_real_distribution<double> uniform_x(0.0, 100.0);
    std::uniform_int_distribution<int> uniform_y(0, static_cast<int>(spec.rows) - 1);
    std::uniform_int_distribution<int> noise(0, kNoiseWidth - 1);
    std::uniform_int_distribution<int> category(0, kCategoryCount - 1);
    for (std::size_t row = 0; row < spec.rows; ++row) {
      std::size_t column = 0;
      if (shape.has_id) {
        data.columns[column++].push_integer(static_cast<KeyValue>(row + 1));
      }
      std::size_t first_rank = 0;
      for (std::size_t f = 0; f < shape.foreign_keys.size(); ++f) {
        const auto rank = zipf.sample(rng);
        if (f == 0) {
          first_rank = rank;
        }
        data.columns[column++].push_integer(rank_to_key.at(shape.foreign_keys[f].second)[rank]);
      }
      data.columns[column++].push_real(std::round(uniform_x(rng) * 1000.0) / 1000.0);
      const bool correlated = spec.correlated && !shape.foreign_keys.empty();
      data.columns[column++].push_integer(correlated ? static_cast<KeyValue>(first_rank) + noise(rng)
                                                     : uniform_y(rng));
      data.columns[column++].push_text("c" + std::to_string(category(rng)));
    }
    dataset.schema.tables.push_back(std::move(def));
    dataset.tables.emplace(shape.name, std::move(data));
  }
  return dataset;
}

void write_dataset(SyntheticDataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (auto& def : dataset.schema.tables) {
    def.source = dir / (def.name + ".csv");
    std::ofstream out(def.source, std::ios::binary);
    if (!out) {
      throw Error("cannot write '" + def.source.string() + "'");
    }
    write_table_csv(dataset.tables.at(def.name), out);
  }
  std::ofstream out(dir / "schema.json", std::ios::binary);
  if (!out) {
    throw Error("cannot write '" + (dir / "schema.json").string() + "'");
  }
  out << schema_to_json(dataset.schema).dump(2) << '\n';
}

namespace {

std::string count_query(const std::vector<std::string>& tables, const std::vector<std::string>& conditions) {
  std::string sql = "SELECT COUNT(*) FROM ";
  for (std::size_t i = 0; i < tables.size(); ++i) {
    sql += (i > 0 ? ", " : "") + tables[i];
  }
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    sql += (i == 0 ? " WHERE " : " AND ") + conditions[i];
  }
  return sql + ";";
}

}  // namespace

std::vector<std::string> pure_join_workload(const Schema& schema) {
  const auto n = schema.tables.size();
  if (n > 20) {
    throw Error("too many tables to enumerate subsets");
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) {
    index[schema.tables[i].name] = i;
  }
  std::vector<std::string> queries;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (std::popcount(mask) < 2) {
      continue;
    }
    std::vector<std::string> tables;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        tables.push_back(schema.tables[i].name);
      }
    }
    std::vector<std::string> conditions;
    for (const auto& fk : schema.foreign_keys) {
      if ((mask & (1u << index.at(fk.from.table))) && (mask & (1u << index.at(fk.to.table)))) {
        conditions.push_back(fk.to.qualified() + " = " + fk.from.qualified());
      }
    }
    // The foreign-key graph is a forest, so a subset is connected iff it has |tables| - 1 edges.
    if (conditions.size() + 1 == tables.size()) {
      queries.push_back(count_query(tables, conditions));
    }
  }
  return queries;
}

std::vector<std::string> correlated_workload(const Schema& schema, const std::vector<int>& thresholds) {
  std::vector<std::string> stars;
  for (const auto& fk : schema.foreign_keys) {
    if (fk.to.table == "t0" && fk.from.table != "t1") {
      stars.push_back(fk.from.table);
    }
  }
  std::vector<std::string> queries;
  for (const int threshold : thresholds) {
    const auto filter = "t1.y >= " + std::to_string(threshold);
    queries.push_back(count_query({"t0", "t1"}, {"t0.id = t1.k", filter}));
    std::vector<std::string> tables{"t0", "t1"};
    std::vector<std::string> conditions{"t0.id = t1.k"};
    for (const auto& other : stars) {
      tables.push_back(other);
      conditions.push_back("t0.id = " + other + ".k");
      auto with_filter = conditions;
      with_filter.push_back(filter);
      queries.push_back(count_query(tables, with_filter));
    }
  }
  return queries;
}

}  // namespace tkhist
