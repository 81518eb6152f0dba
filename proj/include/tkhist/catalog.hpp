#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace tkhist {

using KeyValue = std::int64_t;

enum class ValueKind { kInteger, kReal, kCategorical };
enum class ColumnRole { kKey, kAttribute };
enum class ColumnClass { kNumeric, kCategorical };

std::string_view to_string(ValueKind kind);
ValueKind parse_value_kind(std::string_view text);

// A table-qualified column name. In queries the table part holds an alias.
struct ColumnRef {
  std::string table;
  std::string column;

  std::string qualified() const { return table + "." + column; }
  static ColumnRef parse(std::string_view text);

  auto operator<=>(const ColumnRef&) const = default;
};

struct ColumnDef {
  std::string name;
  ValueKind kind = ValueKind::kInteger;
  ColumnRole role = ColumnRole::kAttribute;
  bool declared_categorical = false;
};

struct TableDef {
  std::string name;
  std::filesystem::path source;
  std::vector<ColumnDef> columns;
  std::optional<std::string> primary_key;

  const ColumnDef* find_column(std::string_view column) const;
};

struct ForeignKey {
  ColumnRef from;
  ColumnRef to;
};

// An equality between two columns. Constructed through make_edge so that left <= right.
struct JoinEdge {
  ColumnRef left;
  ColumnRef right;

  auto operator<=>(const JoinEdge&) const = default;
};

JoinEdge make_edge(ColumnRef a, ColumnRef b);
JoinEdge parse_edge(std::string_view text);  // "t1.c=t2.c"

using JoinTemplate = std::vector<JoinEdge>;

struct Schema {
  std::vector<TableDef> tables;
  std::vector<ForeignKey> foreign_keys;
  std::size_t categorical_threshold = 1000;
  std::vector<JoinTemplate> templates;

  const TableDef* find_table(std::string_view name) const;
  const TableDef& table(std::string_view name) const;
};

Schema load_schema(const std::filesystem::path& path);
// Relative table sources are resolved against base_dir.
Schema parse_schema(const nlohmann::json& document, const std::filesystem::path& base_dir);
// Table files are written as bare file names unless full_paths is set.
nlohmann::json schema_to_json(const Schema& schema, bool full_paths = false);
void validate_schema(const Schema& schema);

// Columnar storage for one column. Categorical columns keep their text, the others a number.
class ColumnData {
 public:
  explicit ColumnData(ValueKind kind = ValueKind::kInteger) : kind_(kind) {}

  ValueKind kind() const { return kind_; }
  std::size_t size() const { return nulls_.size(); }
  bool is_null(std::size_t row) const { return nulls_[row] != 0; }
  std::size_t null_count() const;

  KeyValue integer(std::size_t row) const { return integers_[row]; }
  double numeric(std::size_t row) const;
  const std::string& text(std::size_t row) const { return texts_[row]; }
  // Canonical text for frequency histograms and categorical bins.
  std::string label(std::size_t row) const;

  void push_null();
  void push_integer(KeyValue value);
  void push_real(double value);
  void push_text(std::string value);
  // Parses one CSV cell per the column kind; an empty cell is null. Returns false if unparseable.
  bool push_cell(std::string_view cell);

  bool operator==(const ColumnData&) const = default;

 private:
  ValueKind kind_;
  std::vector<KeyValue> integers_;
  std::vector<double> reals_;
  std::vector<std::string> texts_;
  std::vector<std::uint8_t> nulls_;
};

struct TableData {
  std::string name;
  std::vector<std::string> column_names;
  std::vector<ColumnData> columns;
  std::size_t row_count = 0;

  const ColumnData& column(std::string_view name) const;
  ColumnData& column(std::string_view name);
  bool has_column(std::string_view name) const;
  void append_rows(const TableData& other);

  bool operator==(const TableData&) const = default;
};

TableData ingest_table(const TableDef& def, const Schema& schema);
TableData read_table_csv(const TableDef& def, std::istream& in);
void write_table_csv(const TableData& data, std::ostream& out);
std::string format_real(double value);

// Equi-width binning over [lo, hi). Locating clamps to the last bin so hi itself is included.
struct EquiWidthBinning {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 1;

  double width() const { return (hi - lo) / static_cast<double>(count); }
  double lower(std::size_t bin) const;
  double upper(std::size_t bin) const;
  std::size_t locate(double value) const;
  bool contains(double value) const { return value >= lo && value <= hi; }

  bool operator==(const EquiWidthBinning&) const = default;
};

struct KeyDomain {
  std::string id;
  std::vector<ColumnRef> members;  // sorted
  KeyValue global_min = 0;
  KeyValue global_max = 0;
  EquiWidthBinning binning;
  bool bounded = false;

  std::size_t bin_count() const { return binning.count; }
  std::vector<double> boundaries() const;
  bool contains(KeyValue value) const { return bounded && value >= global_min && value <= global_max; }
  std::size_t locate(KeyValue value) const;
  // Integer keys occupy unit cells, so the binned range is [min, max + 1).
  void set_bounds(KeyValue min, KeyValue max, std::size_t bins);
  bool has_member(const ColumnRef& column) const;

  bool operator==(const KeyDomain&) const = default;
};

std::vector<KeyDomain> infer_key_domains(const Schema& schema);

// Classification of every column of the table; key columns are always numeric.
std::map<std::string, ColumnClass> classify_columns(const TableData& data, const TableDef& def,
                                                    std::size_t threshold);

}  // namespace tkhist
