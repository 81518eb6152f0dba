#include "tkhist/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "tkhist/csv.hpp"
#include "tkhist/error.hpp"

namespace tkhist {

namespace {

// Union-find keyed by string; used for key domains and for template cycle checks.
class DisjointSets {
 public:
  std::string find(const std::string& item) {
    auto it = parent_.find(item);
    if (it == parent_.end()) {
      parent_.emplace(item, item);
      return item;
    }
    if (it->second == item) {
      return item;
    }
    auto root = find(it->second);
    parent_[item] = root;
    return root;
  }

  // Returns false if both items were already in one set.
  bool unite(const std::string& a, const std::string& b) {
    auto root_a = find(a);
    auto root_b = find(b);
    if (root_a == root_b) {
      return false;
    }
    // Smaller name becomes the root so results do not depend on edge order.
    if (root_b < root_a) {
      std::swap(root_a, root_b);
    }
    parent_[root_b] = root_a;
    return true;
  }

  const std::map<std::string, std::string>& items() const { return parent_; }

 private:
  std::map<std::string, std::string> parent_;
};

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  return text;
}

void require_column(const Schema& schema, const ColumnRef& ref, const std::string& context) {
  const auto* table = schema.find_table(ref.table);
  if (table == nullptr || table->find_column(ref.column) == nullptr) {
    throw Error(context + ": " + ref.qualified());
  }
}

}  // namespace

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::kInteger:
      return "integer";
    case ValueKind::kReal:
      return "real";
    case ValueKind::kCategorical:
      return "categorical";
  }
  return "integer";
}

ValueKind parse_value_kind(std::string_view text) {
  if (text == "integer" || text == "int") {
    return ValueKind::kInteger;
  }
  if (text == "real" || text == "float" || text == "double") {
    return ValueKind::kReal;
  }
  if (text == "categorical" || text == "string" || text == "text") {
    return ValueKind::kCategorical;
  }
  throw Error("unknown column kind '" + std::string(text) + "'");
}

ColumnRef ColumnRef::parse(std::string_view text) {
  text = trim(text);
  const auto dot = text.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size()) {
    throw Error("expected qualified column 'table.column', got '" + std::string(text) + "'");
  }
  return ColumnRef{std::string(trim(text.substr(0, dot))), std::string(trim(text.substr(dot + 1)))};
}

const ColumnDef* TableDef::find_column(std::string_view column) const {
  const auto it = std::find_if(columns.begin(), columns.end(), [&](const auto& c) { return c.name == column; });
  return it == columns.end() ? nullptr : &*it;
}

JoinEdge make_edge(ColumnRef a, ColumnRef b) {
  if (b < a) {
    std::swap(a, b);
  }
  return JoinEdge{std::move(a), std::move(b)};
}

JoinEdge parse_edge(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw Error("expected join edge 'a.x=b.y', got '" + std::string(text) + "'");
  }
  return make_edge(ColumnRef::parse(text.substr(0, eq)), ColumnRef::parse(text.substr(eq + 1)));
}

const TableDef* Schema::find_table(std::string_view name) const {
  const auto it = std::find_if(tables.begin(), tables.end(), [&](const auto& t) { return t.name == name; });
  return it == tables.end() ? nullptr : &*it;
}

const TableDef& Schema::table(std::string_view name) const {
  const auto* def = find_table(name);
  if (def == nullptr) {
    throw Error("unknown table '" + std::string(name) + "'");
  }
  return *def;
}

Schema parse_schema(const nlohmann::json& document, const std::filesystem::path& base_dir) {
  Schema schema;
  try {
    for (const auto& table_doc : document.at("tables")) {
      TableDef def;
      def.name = table_doc.at("name").get<std::string>();
      std::filesystem::path source = table_doc.value("file", def.name + ".csv");
      def.source = source.is_absolute() ? source : base_dir / source;
      for (const auto& column_doc : table_doc.at("columns")) {
        ColumnDef column;
        column.name = column_doc.at("name").get<std::string>();
        column.kind = parse_value_kind(column_doc.value("kind", "integer"));
        const auto role = column_doc.value("role", "attribute");
        if (role != "key" && role != "attribute") {
          throw Error("unknown column role '" + role + "'");
        }
        column.role = role == "key" ? ColumnRole::kKey : ColumnRole::kAttribute;
        column.declared_categorical =
            column_doc.value("categorical", false) || column.kind == ValueKind::kCategorical;
        def.columns.push_back(std::move(column));
      }
      if (table_doc.contains("primary_key") && !table_doc.at("primary_key").is_null()) {
        def.primary_key = table_doc.at("primary_key").get<std::string>();
      }
      schema.tables.push_back(std::move(def));
    }
    if (document.contains("foreign_keys")) {
      for (const auto& fk : document.at("foreign_keys")) {
        schema.foreign_keys.push_back(ForeignKey{ColumnRef::parse(fk.at("from").get<std::string>()),
                                                 ColumnRef::parse(fk.at("to").get<std::string>())});
      }
    }
    if (document.contains("categorical_threshold")) {
      const auto threshold = document.at("categorical_threshold").get<std::int64_t>();
      if (threshold < 1) {
        throw Error("categorical_threshold must be at least 1");
      }
      schema.categorical_threshold = static_cast<std::size_t>(threshold);
    }
    if (document.contains("templates")) {
      for (const auto& template_doc : document.at("templates")) {
        JoinTemplate join_template;
        for (const auto& edge : template_doc) {
          join_template.push_back(parse_edge(edge.get<std::string>()));
        }
        schema.templates.push_back(std::move(join_template));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed schema document: ") + e.what());
  }
  validate_schema(schema);
  return schema;
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open schema file " + path.string());
  }
  nlohmann::json document;
  try {
    document = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("schema parse failure: ") + e.what());
  }
  return parse_schema(document, std::filesystem::absolute(path).parent_path());
}

nlohmann::json schema_to_json(const Schema& schema, bool full_paths) {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& table : schema.tables) {
    nlohmann::json columns = nlohmann::json::array();
    for (const auto& column : table.columns) {
      nlohmann::json c = {{"name", column.name},
                          {"kind", std::string(to_string(column.kind))},
                          {"role", column.role == ColumnRole::kKey ? "key" : "attribute"}};
      if (column.declared_categorical && column.kind != ValueKind::kCategorical) {
        c["categorical"] = true;
      }
      columns.push_back(std::move(c));
    }
    nlohmann::json t = {{"name", table.name}, {"file", full_paths ? table.source.lexically_normal().string() : table.source.filename().string()}, {"columns", columns}};
    if (table.primary_key) {
      t["primary_key"] = *table.primary_key;
    }
    tables.push_back(std::move(t));
  }
  nlohmann::json fks = nlohmann::json::array();
  for (const auto& fk : schema.foreign_keys) {
    fks.push_back({{"from", fk.from.qualified()}, {"to", fk.to.qualified()}});
  }
  nlohmann::json templates = nlohmann::json::array();
  for (const auto& join_template : schema.templates) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& edge : join_template) {
      edges.push_back(edge.left.qualified() + "=" + edge.right.qualified());
    }
    templates.push_back(std::move(edges));
  }
  return {{"tables", tables},
          {"foreign_keys", fks},
          {"categorical_threshold", schema.categorical_threshold},
          {"templates", templates}};
}

void validate_schema(const Schema& schema) {
  if (schema.categorical_threshold < 1) {
    throw Error("categorical_threshold must be at least 1");
  }
  std::set<std::string> table_names;
  for (const auto& table : schema.tables) {
    if (!table_names.insert(table.name).second) {
      throw Error("duplicate table '" + table.name + "'");
    }
    std::set<std::string> column_names;
    for (const auto& column : table.columns) {
      if (!column_names.insert(column.name).second) {
        throw Error("duplicate column '" + column.name + "' in table '" + table.name + "'");
      }
      if (column.role == ColumnRole::kKey && column.kind != ValueKind::kInteger) {
        throw Error("key column " + table.name + "." + column.name + " must be integer");
      }
    }
    if (table.primary_key && table.find_column(*table.primary_key) == nullptr) {
      throw Error("primary key '" + *table.primary_key + "' is not a column of '" + table.name + "'");
    }
  }
  for (const auto& fk : schema.foreign_keys) {
    require_column(schema, fk.from, "dangling foreign key");
    require_column(schema, fk.to, "dangling foreign key");
    for (const auto& end : {fk.from, fk.to}) {
      if (schema.table(end.table).find_column(end.column)->kind != ValueKind::kInteger) {
        throw Error("foreign key column " + end.qualified() + " must be integer");
      }
    }
  }
  const auto domains = infer_key_domains(schema);
  for (const auto& join_template : schema.templates) {
    DisjointSets tables;
    for (const auto& edge : join_template) {
      require_column(schema, edge.left, "template references unknown column");
      require_column(schema, edge.right, "template references unknown column");
      const bool same_domain = std::any_of(domains.begin(), domains.end(), [&](const KeyDomain& d) {
        return d.has_member(edge.left) && d.has_member(edge.right);
      });
      if (!same_domain) {
        throw Error("template edge " + edge.left.qualified() + "=" + edge.right.qualified() +
                    " does not connect columns of one key domain");
      }
      if (!tables.unite(edge.left.table, edge.right.table)) {
        throw Error("cyclic template: edge " + edge.left.qualified() + "=" + edge.right.qualified() +
                    " closes a cycle");
      }
    }
  }
}

std::size_t ColumnData::null_count() const {
  return static_cast<std::size_t>(std::count(nulls_.begin(), nulls_.end(), std::uint8_t{1}));
}

double ColumnData::numeric(std::size_t row) const {
  switch (kind_) {
    case ValueKind::kInteger:
      return static_cast<double>(integers_[row]);
    case ValueKind::kReal:
      return reals_[row];
    case ValueKind::kCategorical:
      break;
  }
  throw Error("categorical column has no numeric value");
}

std::string format_real(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string ColumnData::label(std::size_t row) const {
  switch (kind_) {
    case ValueKind::kInteger:
      return std::to_string(integers_[row]);
    case ValueKind::kReal:
      return format_real(reals_[row]);
    case ValueKind::kCategorical:
      return texts_[row];
  }
  return {};
}

void ColumnData::push_null() {
  switch (kind_) {
    case ValueKind::kInteger:
      integers_.push_back(0);
      break;
    case ValueKind::kReal:
      reals_.push_back(0.0);
      break;
    case ValueKind::kCategorical:
      texts_.emplace_back();
      break;
  }
  nulls_.push_back(1);
}

void ColumnData::push_integer(KeyValue value) {
  if (kind_ == ValueKind::kReal) {
    push_real(static_cast<double>(value));
    return;
  }
  if (kind_ != ValueKind::kInteger) {
    throw Error("push_integer on non-integer column");
  }
  integers_.push_back(value);
  nulls_.push_back(0);
}

void ColumnData::push_real(double value) {
  if (kind_ != ValueKind::kReal) {
    throw Error("push_real on non-real column");
  }
  reals_.push_back(value);
  nulls_.push_back(0);
}

void ColumnData::push_text(std::string value) {
  if (kind_ != ValueKind::kCategorical) {
    throw Error("push_text on non-categorical column");
  }
  texts_.push_back(std::move(value));
  nulls_.push_back(0);
}

bool ColumnData::push_cell(std::string_view cell) {
  if (cell.empty()) {
    push_null();
    return true;
  }
  switch (kind_) {
    case ValueKind::kInteger: {
      KeyValue value = 0;
      const auto trimmed = trim(cell);
      const auto result = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
      if (result.ec != std::errc() || result.ptr != trimmed.data() + trimmed.size()) {
        return false;
      }
      push_integer(value);
      return true;
    }
    case ValueKind::kReal: {
      double value = 0.0;
      const auto trimmed = trim(cell);
      const auto result = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
      if (result.ec != std::errc() || result.ptr != trimmed.data() + trimmed.size() || !std::isfinite(value)) {
        return false;
      }
      push_real(value);
      return true;
    }
    case ValueKind::kCategorical:
      push_text(std::string(cell));
      return true;
  }
  return false;
}

const ColumnData& TableData::column(std::string_view name) const {
  const auto it = std::find(column_names.begin(), column_names.end(), name);
  if (it == column_names.end()) {
    throw Error("table '" + this->name + "' has no column '" + std::string(name) + "'");
  }
  return columns[static_cast<std::size_t>(it - column_names.begin())];
}

ColumnData& TableData::column(std::string_view name) {
  return const_cast<ColumnData&>(std::as_const(*this).column(name));
}

bool TableData::has_column(std::string_view name) const {
  return std::find(column_names.begin(), column_names.end(), name) != column_names.end();
}

void TableData::append_rows(const TableData& other) {
  if (other.column_names != column_names) {
    throw Error("cannot append rows with a different column layout to '" + name + "'");
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& source = other.columns[c];
    auto& target = columns[c];
    for (std::size_t row = 0; row < source.size(); ++row) {
      if (source.is_null(row)) {
        target.push_null();
      } else if (source.kind() == ValueKind::kInteger) {
        target.push_integer(source.integer(row));
      } else if (source.kind() == ValueKind::kReal) {
        target.push_real(source.numeric(row));
      } else {
        target.push_text(source.text(row));
      }
    }
  }
  row_count += other.row_count;
}

TableData read_table_csv(const TableDef& def, std::istream& in) {
  const auto header = csv::read_record(in);
  if (!header) {
    throw Error("table '" + def.name + "': missing header row");
  }
  TableData data;
  data.name = def.name;
  // Map declared columns onto header positions; extra header columns are ignored.
  std::vector<std::size_t> positions;
  for (const auto& column : def.columns) {
    const auto it = std::find_if(header->begin(), header->end(),
                                 [&](const std::string& h) { return trim(h) == column.name; });
    if (it == header->end()) {
      throw Error("table '" + def.name + "': missing column '" + column.name + "'");
    }
    positions.push_back(static_cast<std::size_t>(it - header->begin()));
    data.column_names.push_back(column.name);
    data.columns.emplace_back(column.kind);
  }
  std::size_t row = 0;
  while (auto record = csv::read_record(in)) {
    if (record->size() == 1 && (*record)[0].empty() && in.peek() == std::char_traits<char>::eof()) {
      break;
    }
    ++row;
    for (std::size_t c = 0; c < positions.size(); ++c) {
      const std::string_view cell = positions[c] < record->size() ? std::string_view((*record)[positions[c]]) : "";
      if (!data.columns[c].push_cell(cell)) {
        throw Error("table '" + def.name + "': unparseable " + std::string(to_string(def.columns[c].kind)) +
                    " value '" + std::string(cell) + "' at row " + std::to_string(row) + ", column '" +
                    def.columns[c].name + "'");
      }
    }
  }
  data.row_count = row;
  return data;
}

TableData ingest_table(const TableDef& def, const Schema& /*schema*/) {
  std::ifstream in(def.source, std::ios::binary);
  if (!in) {
    throw Error("cannot open data file " + def.source.string() + " for table '" + def.name + "'");
  }
  return read_table_csv(def, in);
}

void write_table_csv(const TableData& data, std::ostream& out) {
  csv::write_record(out, data.column_names);
  std::vector<std::string> fields(data.columns.size());
  for (std::size_t row = 0; row < data.row_count; ++row) {
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
      fields[c] = data.columns[c].is_null(row) ? std::string() : data.columns[c].label(row);
    }
    csv::write_record(out, fields);
  }
}

double EquiWidthBinning::lower(std::size_t bin) const {
  return lo + width() * static_cast<double>(bin);
}

double EquiWidthBinning::upper(std::size_t bin) const {
  return bin + 1 == count ? hi : lo + width() * static_cast<double>(bin + 1);
}

std::size_t EquiWidthBinning::locate(double value) const {
  const double position = std::floor((value - lo) / width());
  if (position <= 0.0) {
    return 0;
  }
  return std::min(static_cast<std::size_t>(position), count - 1);
}

std::vector<double> KeyDomain::boundaries() const {
  std::vector<double> result;
  for (std::size_t i = 0; i < binning.count; ++i) {
    result.push_back(binning.lower(i));
  }
  result.push_back(binning.hi);
  return result;
}

std::size_t KeyDomain::locate(KeyValue value) const {
  if (!contains(value)) {
    throw Error("key value " + std::to_string(value) + " outside domain " + id + " [" + std::to_string(global_min) +
                ", " + std::to_string(global_max) + "]");
  }
  return binning.locate(static_cast<double>(value));
}

void KeyDomain::set_bounds(KeyValue min, KeyValue max, std::size_t bins) {
  if (bins == 0) {
    throw Error("bin count must be positive");
  }
  if (max < min) {
    throw Error("empty key range for domain " + id);
  }
  global_min = min;
  global_max = max;
  binning = EquiWidthBinning{static_cast<double>(min), static_cast<double>(max) + 1.0, bins};
  bounded = true;
}

bool KeyDomain::has_member(const ColumnRef& column) const {
  return std::binary_search(members.begin(), members.end(), column);
}

std::vector<KeyDomain> infer_key_domains(const Schema& schema) {
  DisjointSets sets;
  std::map<std::string, ColumnRef> refs;
  auto add = [&](const ColumnRef& ref) {
    refs.emplace(ref.qualified(), ref);
    sets.find(ref.qualified());
  };
  for (const auto& fk : schema.foreign_keys) {
    add(fk.from);
    add(fk.to);
    sets.unite(fk.from.qualified(), fk.to.qualified());
  }
  for (const auto& join_template : schema.templates) {
    for (const auto& edge : join_template) {
      add(edge.left);
      add(edge.right);
    }
  }
  std::map<std::string, std::vector<ColumnRef>> components;
  for (const auto& [name, ref] : refs) {
    components[sets.find(name)].push_back(ref);
  }
  std::vector<KeyDomain> domains;
  for (auto& [root, members] : components) {
    std::sort(members.begin(), members.end());
    bool keep = members.size() >= 2;
    if (!keep) {
      // A lone primary key still gets a domain if a template joins on it.
      const auto& only = members.front();
      const auto* table = schema.find_table(only.table);
      keep = table != nullptr && table->primary_key == only.column;
    }
    if (keep) {
      KeyDomain domain;
      domain.id = members.front().qualified();
      domain.members = std::move(members);
      domains.push_back(std::move(domain));
    }
  }
  return domains;
}

std::map<std::string, ColumnClass> classify_columns(const TableData& data, const TableDef& def,
                                                    std::size_t threshold) {
  std::map<std::string, ColumnClass> result;
  for (const auto& column : def.columns) {
    if (column.role == ColumnRole::kKey) {
      result[column.name] = ColumnClass::kNumeric;
      continue;
    }
    if (column.declared_categorical || column.kind == ValueKind::kCategorical) {
      result[column.name] = ColumnClass::kCategorical;
      continue;
    }
    const auto& values = data.column(column.name);
    std::unordered_set<std::string> distinct;
    for (std::size_t row = 0; row < values.size() && distinct.size() < threshold; ++row) {
      if (!values.is_null(row)) {
        distinct.insert(values.label(row));
      }
    }
    result[column.name] = distinct.size() < threshold ? ColumnClass::kCategorical : ColumnClass::kNumeric;
  }
  return result;
}

}  // namespace tkhist
