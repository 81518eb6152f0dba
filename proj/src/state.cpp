#include "tkhist/state.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tkhist/error.hpp"

namespace tkhist {

using nlohmann::json;

const TKHist1D& TableStats::key_hist(std::string_view column) const {
  const auto it = key_hists.find(std::string(column));
  if (it == key_hists.end()) {
    throw Error("missing histogram for join key " + name + "." + std::string(column));
  }
  return it->second;
}

const TKHist2D& TableStats::pair_hist(const std::string& key_column, const std::string& other) const {
  const auto it = pair_hists.find({key_column, other});
  if (it == pair_hists.end()) {
    throw Error("missing 2D histogram for " + name + "." + key_column + " x " + other);
  }
  return it->second;
}

const KeyDomain* State::domain_of(const ColumnRef& column) const {
  for (const auto& domain : domains) {
    if (domain.has_member(column)) {
      return &domain;
    }
  }
  return nullptr;
}

const KeyDomain& State::domain(std::string_view id) const {
  const auto it = std::find_if(domains.begin(), domains.end(), [&](const KeyDomain& d) { return d.id == id; });
  if (it == domains.end()) {
    throw Error("unknown key domain '" + std::string(id) + "'");
  }
  return *it;
}

const TableStats& State::table(std::string_view name) const {
  const auto it = tables.find(std::string(name));
  if (it == tables.end()) {
    throw Error("no statistics for table '" + std::string(name) + "'");
  }
  return it->second;
}

namespace {

json binning_to_json(const EquiWidthBinning& binning) {
  return {{"lo", binning.lo}, {"hi", binning.hi}, {"count", binning.count}};
}

EquiWidthBinning binning_from_json(const json& doc) {
  return EquiWidthBinning{doc.at("lo").get<double>(), doc.at("hi").get<double>(), doc.at("count").get<std::size_t>()};
}

template <typename Enum>
int enum_code(Enum value) {
  return static_cast<int>(value);
}

json hist1d_to_json(const TKHist1D& hist) {
  json bins = json::array();
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    const auto& bin = hist.bin(i);
    json container = json::array();
    for (const auto& [key, frequency] : bin.container.sorted_entries()) {
      container.push_back({key, frequency});
    }
    std::vector<KeyValue> background(bin.background.begin(), bin.background.end());
    std::sort(background.begin(), background.end());
    bins.push_back({{"nv", bin.nv}, {"container", container}, {"background", background}});
  }
  return {{"domain", hist.domain_id()}, {"binning", binning_to_json(hist.binning())},
          {"min", hist.min_key()},      {"max", hist.max_key()},
          {"k", hist.k()},              {"bins", bins}};
}

TKHist1D hist1d_from_json(const json& doc) {
  TKHist1D hist(doc.at("domain").get<std::string>(), binning_from_json(doc.at("binning")),
                doc.at("min").get<KeyValue>(), doc.at("max").get<KeyValue>(), doc.at("k").get<std::size_t>());
  auto& bins = hist.mutable_bins();
  const auto& bins_doc = doc.at("bins");
  if (bins_doc.size() != bins.size()) {
    throw Error("histogram bin count does not match its binning");
  }
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const auto& bin_doc = bins_doc[i];
    bins[i].nv = bin_doc.at("nv").get<Count>();
    for (const auto& entry : bin_doc.at("container")) {
      bins[i].container.insert(entry.at(0).get<KeyValue>(), entry.at(1).get<Count>());
    }
    for (const auto& key : bin_doc.at("background")) {
      bins[i].background.insert(key.get<KeyValue>());
    }
  }
  return hist;
}

json attribute_binning_to_json(const AttributeBinning& binning) {
  if (binning.kind() == AttributeBinning::Kind::kEquiWidth) {
    return {{"kind", "equi_width"},
            {"binning", binning_to_json(binning.equi_width_binning())},
            {"integer_cells", binning.integer_cells()}};
  }
  return {{"kind", "discrete"}, {"labels", binning.labels()}, {"numeric", binning.numeric_labels()}};
}

AttributeBinning attribute_binning_from_json(const json& doc) {
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "equi_width") {
    return AttributeBinning::equi_width(binning_from_json(doc.at("binning")), doc.at("integer_cells").get<bool>());
  }
  if (kind == "discrete") {
    return AttributeBinning::discrete(doc.at("labels").get<std::vector<std::string>>(), doc.at("numeric").get<bool>());
  }
  throw Error("unknown attribute binning kind '" + kind + "'");
}

json hist2d_to_json(const TKHist2D& hist) {
  // Sparse [key_bin, attribute_bin, count] triples.
  json cells = json::array();
  for (std::size_t i = 0; i < hist.key_bins(); ++i) {
    for (std::size_t j = 0; j < hist.attribute_bins(); ++j) {
      if (const auto count = hist.at(i, j); count != 0) {
        cells.push_back({i, j, count});
      }
    }
  }
  json nulls = json::array();
  for (std::size_t i = 0; i < hist.key_bins(); ++i) {
    if (const auto count = hist.null_attributes(i); count != 0) {
      nulls.push_back({i, count});
    }
  }
  return {{"key_column", hist.key_column()},
          {"attribute_column", hist.attribute_column()},
          {"key_binning", binning_to_json(hist.key_binning())},
          {"attribute_binning", attribute_binning_to_json(hist.attribute_binning())},
          {"cells", cells},
          {"nulls", nulls}};
}

TKHist2D hist2d_from_json(const json& doc) {
  TKHist2D hist(doc.at("key_column").get<std::string>(), doc.at("attribute_column").get<std::string>(),
                binning_from_json(doc.at("key_binning")), attribute_binning_from_json(doc.at("attribute_binning")));
  for (const auto& cell : doc.at("cells")) {
    hist.add(cell.at(0).get<std::size_t>(), cell.at(1).get<std::size_t>(), cell.at(2).get<Count>());
  }
  for (const auto& entry : doc.at("nulls")) {
    hist.add_null_attribute(entry.at(0).get<std::size_t>(), entry.at(1).get<Count>());
  }
  return hist;
}

json table_to_json(const TableStats& stats) {
  json columns = json::object();
  for (const auto& [name, column] : stats.columns) {
    columns[name] = {{"kind", std::string(to_string(column.kind))},
                     {"role", column.role == ColumnRole::kKey ? "key" : "attribute"},
                     {"categorical", column.column_class == ColumnClass::kCategorical},
                     {"non_null", column.non_null}};
  }
  json key_hists = json::object();
  for (const auto& [name, hist] : stats.key_hists) {
    key_hists[name] = hist1d_to_json(hist);
  }
  json pair_hists = json::array();
  for (const auto& [columns_pair, hist] : stats.pair_hists) {
    pair_hists.push_back(hist2d_to_json(hist));
  }
  json table_hists = json::object();
  for (const auto& [name, hist] : stats.table_hists) {
    table_hists[name] = hist2d_to_json(hist);
  }
  json frequency_hists = json::object();
  for (const auto& [name, hist] : stats.frequency_hists) {
    frequency_hists[name] = hist.counts;
  }
  return {{"row_count", stats.row_count},     {"columns", columns},
          {"key_hists", key_hists},           {"pair_hists", pair_hists},
          {"table_hists", table_hists},       {"frequency_hists", frequency_hists}};
}

TableStats table_from_json(const std::string& name, const json& doc) {
  TableStats stats;
  stats.name = name;
  stats.row_count = doc.at("row_count").get<Count>();
  for (const auto& [column, column_doc] : doc.at("columns").items()) {
    ColumnStats column_stats;
    column_stats.kind = parse_value_kind(column_doc.at("kind").get<std::string>());
    column_stats.role = column_doc.at("role").get<std::string>() == "key" ? ColumnRole::kKey : ColumnRole::kAttribute;
    column_stats.column_class =
        column_doc.at("categorical").get<bool>() ? ColumnClass::kCategorical : ColumnClass::kNumeric;
    column_stats.non_null = column_doc.at("non_null").get<Count>();
    stats.columns.emplace(column, column_stats);
  }
  for (const auto& [column, hist_doc] : doc.at("key_hists").items()) {
    stats.key_hists.emplace(column, hist1d_from_json(hist_doc));
  }
  for (const auto& hist_doc : doc.at("pair_hists")) {
    auto hist = hist2d_from_json(hist_doc);
    auto key = std::make_pair(hist.key_column(), hist.attribute_column());
    stats.pair_hists.emplace(std::move(key), std::move(hist));
  }
  for (const auto& [column, hist_doc] : doc.at("table_hists").items()) {
    stats.table_hists.emplace(column, hist2d_from_json(hist_doc));
  }
  for (const auto& [column, counts] : doc.at("frequency_hists").items()) {
    stats.frequency_hists[column].counts = counts.get<std::map<std::string, Count>>();
  }
  return stats;
}

json correlations_to_json(const CorrelationMap& map) {
  json entries = json::array();
  for (const auto& [key, correlation] : map.entries) {
    json envelopes = json::array();
    for (const auto& [join_key, envelope] : correlation.envelopes) {
      envelopes.push_back({join_key, envelope.min, envelope.max});
    }
    json values = json::array();
    for (const auto& [join_key, labels] : correlation.values) {
      values.push_back({join_key, labels});
    }
    entries.push_back({{"table", key.table},
                       {"key_column", key.key_column},
                       {"attribute", key.attribute},
                       {"domain", correlation.domain_id},
                       {"categorical", correlation.categorical},
                       {"envelopes", envelopes},
                       {"values", values}});
  }
  return {{"dominant_keys", map.dominant_keys}, {"entries", entries}};
}

CorrelationMap correlations_from_json(const json& doc) {
  CorrelationMap map;
  map.dominant_keys = doc.at("dominant_keys").get<std::map<std::string, std::vector<KeyValue>>>();
  for (const auto& entry : doc.at("entries")) {
    CorrelationKey key{entry.at("table").get<std::string>(), entry.at("key_column").get<std::string>(),
                       entry.at("attribute").get<std::string>()};
    AttributeCorrelation correlation;
    correlation.domain_id = entry.at("domain").get<std::string>();
    correlation.categorical = entry.at("categorical").get<bool>();
    for (const auto& envelope : entry.at("envelopes")) {
      correlation.envelopes.emplace(envelope.at(0).get<KeyValue>(),
                                    Envelope{envelope.at(1).get<double>(), envelope.at(2).get<double>()});
    }
    for (const auto& values : entry.at("values")) {
      correlation.values.emplace(values.at(0).get<KeyValue>(), values.at(1).get<std::set<std::string>>());
    }
    map.entries.emplace(std::move(key), std::move(correlation));
  }
  return map;
}

}  // namespace

std::string serialize_state(const State& state) {
  json domains = json::array();
  for (const auto& domain : state.domains) {
    json members = json::array();
    for (const auto& member : domain.members) {
      members.push_back(member.qualified());
    }
    domains.push_back({{"id", domain.id},
                       {"members", members},
                       {"global_min", domain.global_min},
                       {"global_max", domain.global_max},
                       {"bounded", domain.bounded},
                       {"binning", binning_to_json(domain.binning)}});
  }
  json tables = json::object();
  for (const auto& [name, stats] : state.tables) {
    tables[name] = table_to_json(stats);
  }
  const json document = {{"magic", std::string(kStateMagic)},
                         {"version", kStateVersion},
                         {"config",
                          {{"bin_count", state.config.bin_count},
                           {"k", state.config.k},
                           {"correlation_cap", state.config.correlation_cap}}},
                         {"schema", schema_to_json(state.schema, true)},
                         {"domains", domains},
                         {"tables", tables},
                         {"correlations", correlations_to_json(state.correlations)}};
  return document.dump();
}

State deserialize_state(std::string_view text) {
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error&) {
    throw Error("unrecognized state file: not a JSON document");
  }
  if (!document.is_object() || !document.contains("magic") || document.at("magic") != kStateMagic) {
    throw Error("unrecognized state file");
  }
  if (!document.contains("version") || document.at("version") != kStateVersion) {
    throw Error("unsupported state file version " + (document.contains("version") ? document.at("version").dump() : "?"));
  }
  State state;
  try {
    const auto& config = document.at("config");
    state.config.bin_count = config.at("bin_count").get<std::size_t>();
    state.config.k = config.at("k").get<std::size_t>();
    state.config.correlation_cap = config.at("correlation_cap").get<std::size_t>();
    state.schema = parse_schema(document.at("schema"), {});
    for (const auto& domain_doc : document.at("domains")) {
      KeyDomain domain;
      domain.id = domain_doc.at("id").get<std::string>();
      for (const auto& member : domain_doc.at("members")) {
        domain.members.push_back(ColumnRef::parse(member.get<std::string>()));
      }
      domain.global_min = domain_doc.at("global_min").get<KeyValue>();
      domain.global_max = domain_doc.at("global_max").get<KeyValue>();
      domain.bounded = domain_doc.at("bounded").get<bool>();
      domain.binning = binning_from_json(domain_doc.at("binning"));
      state.domains.push_back(std::move(domain));
    }
    for (const auto& [name, table_doc] : document.at("tables").items()) {
      state.tables.emplace(name, table_from_json(name, table_doc));
    }
    state.correlations = correlations_from_json(document.at("correlations"));
  } catch (const json::exception& e) {
    throw Error(std::string("corrupt state file: ") + e.what());
  }
  return state;
}

void save_state(const State& state, const std::filesystem::path& path) {
  auto temporary = path;
  temporary += ".tmp";
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("cannot write state file " + temporary.string());
    }
    out << serialize_state(state);
    if (!out) {
      throw Error("failed writing state file " + temporary.string());
    }
  }
  std::filesystem::rename(temporary, path);
}

State load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open state file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize_state(buffer.str());
}

}  // namespace tkhist
