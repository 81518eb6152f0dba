#include "tkhist/histogram.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>

#include "tkhist/error.hpp"

namespace tkhist {

Count TopKContainer::frequency(KeyValue key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second;
}

Count TopKContainer::total() const {
  Count sum = 0;
  for (const auto& [key, frequency] : entries_) {
    sum += frequency;
  }
  return sum;
}

void TopKContainer::insert(KeyValue key, Count frequency) {
  if (entries_.size() >= capacity_) {
    throw Error("top-k container is full");
  }
  if (!entries_.emplace(key, frequency).second) {
    throw Error("key " + std::to_string(key) + " already stored in top-k container");
  }
}

bool TopKContainer::increment(KeyValue key) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return false;
  }
  ++it->second;
  return true;
}

std::vector<std::pair<KeyValue, Count>> TopKContainer::sorted_entries() const {
  std::vector<std::pair<KeyValue, Count>> result(entries_.begin(), entries_.end());
  std::sort(result.begin(), result.end());
  return result;
}

TKHist1D::TKHist1D(std::string domain_id, EquiWidthBinning binning, KeyValue min, KeyValue max, std::size_t k)
    : domain_id_(std::move(domain_id)), binning_(binning), min_key_(min), max_key_(max), k_(k) {
  bins_.resize(binning_.count, Bin1D{TopKContainer(k), 0, {}});
}

Count TKHist1D::total_rows() const {
  Count total = 0;
  for (const auto& bin : bins_) {
    total += bin.total();
  }
  return total;
}

std::size_t TKHist1D::locate(KeyValue key) const {
  if (key < min_key_ || key > max_key_) {
    throw Error("key value " + std::to_string(key) + " outside domain " + domain_id_ + " bounds [" +
                std::to_string(min_key_) + ", " + std::to_string(max_key_) + "]");
  }
  return binning_.locate(static_cast<double>(key));
}

BinStats TKHist1D::bin_stats(std::size_t index) const {
  if (index >= bins_.size()) {
    throw Error("bin index " + std::to_string(index) + " out of range");
  }
  const auto& bin = bins_[index];
  return BinStats{bin.nv, bin.ndv(), bin.bac(), &bin.container};
}

void TKHist1D::insert(KeyValue key) {
  auto& bin = bins_[locate(key)];
  if (bin.container.increment(key)) {
    return;
  }
  ++bin.nv;
  bin.background.insert(key);
}

namespace {

template <typename ValueAt>
TKHist1D build_from(std::size_t size, ValueAt&& value_at, const KeyDomain& domain, std::size_t k) {
  if (!domain.bounded) {
    throw Error("key domain " + domain.id + " has no bin boundaries");
  }
  TKHist1D hist(domain.id, domain.binning, domain.global_min, domain.global_max, k);
  std::vector<std::unordered_map<KeyValue, Count>> frequencies(domain.bin_count());
  for (std::size_t row = 0; row < size; ++row) {
    const std::optional<KeyValue> value = value_at(row);
    if (!value) {
      continue;
    }
    if (!domain.contains(*value)) {
      throw Error("key value " + std::to_string(*value) + " outside domain " + domain.id +
                  " bounds; the domain is stale");
    }
    ++frequencies[domain.locate(*value)][*value];
  }
  auto& bins = hist.mutable_bins();
  std::vector<std::pair<KeyValue, Count>> ranked;
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    ranked.assign(frequencies[i].begin(), frequencies[i].end());
    // Highest frequency first; ties go to the smaller key.
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    auto& bin = bins[i];
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      if (r < k) {
        bin.container.insert(ranked[r].first, ranked[r].second);
      } else {
        bin.nv += ranked[r].second;
        bin.background.insert(ranked[r].first);
      }
    }
  }
  return hist;
}

}  // namespace

TKHist1D build_tkhist1d(const ColumnData& column, const KeyDomain& domain, std::size_t k) {
  if (column.kind() != ValueKind::kInteger) {
    throw Error("key histograms require an integer column");
  }
  return build_from(
      column.size(),
      [&](std::size_t row) -> std::optional<KeyValue> {
        if (column.is_null(row)) {
          return std::nullopt;
        }
        return column.integer(row);
      },
      domain, k);
}

TKHist1D build_tkhist1d(std::span<const KeyValue> values, const KeyDomain& domain, std::size_t k) {
  return build_from(
      values.size(), [&](std::size_t row) -> std::optional<KeyValue> { return values[row]; }, domain, k);
}

AttributeBinning AttributeBinning::equi_width(EquiWidthBinning binning, bool integer_cells) {
  AttributeBinning result;
  result.kind_ = Kind::kEquiWidth;
  result.binning_ = binning;
  result.integer_cells_ = integer_cells;
  return result;
}

AttributeBinning AttributeBinning::discrete(std::vector<std::string> labels, bool numeric_labels) {
  AttributeBinning result;
  result.kind_ = Kind::kDiscrete;
  result.numeric_labels_ = numeric_labels;
  for (const auto& label : labels) {
    result.add_label(label);
  }
  return result;
}

std::optional<std::size_t> AttributeBinning::find_label(const std::string& label) const {
  const auto it = label_index_.find(label);
  if (it == label_index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::size_t AttributeBinning::add_label(const std::string& label) {
  if (const auto existing = find_label(label)) {
    return *existing;
  }
  if (numeric_labels_) {
    double value = 0.0;
    const auto result = std::from_chars(label.data(), label.data() + label.size(), value);
    if (result.ec != std::errc()) {
      throw Error("non-numeric label '" + label + "' in numeric categorical column");
    }
    label_values_.push_back(value);
  }
  labels_.push_back(label);
  label_index_.emplace(label, labels_.size() - 1);
  return labels_.size() - 1;
}

std::optional<std::size_t> AttributeBinning::locate(const ColumnData& column, std::size_t row) const {
  if (kind_ == Kind::kDiscrete) {
    return find_label(column.label(row));
  }
  return binning_.locate(column.numeric(row));
}

AttributeBinning make_attribute_binning(const ColumnData& column, ColumnClass column_class, std::size_t bins,
                                        const KeyDomain* domain) {
  if (column_class == ColumnClass::kCategorical || column.kind() == ValueKind::kCategorical) {
    const bool numeric = column.kind() != ValueKind::kCategorical;
    std::vector<std::string> labels;
    if (numeric) {
      std::set<double> values;
      for (std::size_t row = 0; row < column.size(); ++row) {
        if (!column.is_null(row)) {
          values.insert(column.numeric(row));
        }
      }
      for (const double value : values) {
        labels.push_back(column.kind() == ValueKind::kInteger ? std::to_string(static_cast<KeyValue>(value))
                                                               : format_real(value));
      }
    } else {
      std::set<std::string> values;
      for (std::size_t row = 0; row < column.size(); ++row) {
        if (!column.is_null(row)) {
          values.insert(column.text(row));
        }
      }
      labels.assign(values.begin(), values.end());
    }
    return AttributeBinning::discrete(std::move(labels), numeric);
  }
  if (domain != nullptr && domain->bounded) {
    return AttributeBinning::equi_width(domain->binning, true);
  }
  bool any = false;
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t row = 0; row < column.size(); ++row) {
    if (column.is_null(row)) {
      continue;
    }
    const double value = column.numeric(row);
    lo = any ? std::min(lo, value) : value;
    hi = any ? std::max(hi, value) : value;
    any = true;
  }
  const bool integer = column.kind() == ValueKind::kInteger;
  if (!any) {
    return AttributeBinning::equi_width(EquiWidthBinning{0.0, 1.0, 1}, integer);
  }
  if (integer) {
    const auto cells = static_cast<std::size_t>(hi - lo) + 1;
    return AttributeBinning::equi_width(EquiWidthBinning{lo, hi + 1.0, std::min(bins, cells)}, true);
  }
  if (hi <= lo) {
    hi = lo + 1.0;
  }
  return AttributeBinning::equi_width(EquiWidthBinning{lo, hi, bins}, false);
}

TKHist2D::TKHist2D(std::string key_column, std::string attribute_column, EquiWidthBinning key_binning,
                   AttributeBinning attribute_binning)
    : key_column_(std::move(key_column)),
      attribute_column_(std::move(attribute_column)),
      key_binning_(key_binning),
      attribute_binning_(std::move(attribute_binning)),
      grid_(key_binning_.count, std::vector<Count>(attribute_binning_.count(), 0)),
      null_attributes_(key_binning_.count, 0) {}

Count TKHist2D::at(std::size_t key_bin, std::size_t attribute_bin) const {
  return grid_.at(key_bin).at(attribute_bin);
}

Count TKHist2D::row_total(std::size_t key_bin) const {
  const auto& row = grid_.at(key_bin);
  return std::accumulate(row.begin(), row.end(), Count{0});
}

Count TKHist2D::total() const {
  Count sum = 0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    sum += row_total(i);
  }
  return sum;
}

void TKHist2D::add(std::size_t key_bin, std::size_t attribute_bin, Count count) {
  grid_.at(key_bin).at(attribute_bin) += count;
}

std::size_t TKHist2D::add_label(const std::string& label) {
  const auto before = attribute_binning_.count();
  const auto index = attribute_binning_.add_label(label);
  if (attribute_binning_.count() != before) {
    for (auto& row : grid_) {
      row.push_back(0);
    }
  }
  return index;
}

void TKHist2D::add_row(std::optional<KeyValue> key, const ColumnData& attribute, std::size_t row) {
  std::size_t key_bin = 0;
  if (!table_level()) {
    if (!key) {
      return;
    }
    key_bin = key_binning_.locate(static_cast<double>(*key));
  }
  if (attribute.is_null(row)) {
    add_null_attribute(key_bin);
    return;
  }
  auto attribute_bin = attribute_binning_.locate(attribute, row);
  if (!attribute_bin) {
    attribute_bin = add_label(attribute.label(row));
  }
  add(key_bin, *attribute_bin);
}

TKHist2D build_tkhist2d(const ColumnData& key, const ColumnData& attribute, const KeyDomain& domain,
                        const AttributeBinning& binning, std::string key_column, std::string attribute_column) {
  if (key.size() != attribute.size()) {
    throw Error("mismatched column lengths for 2D histogram (" + std::to_string(key.size()) + " vs " +
                std::to_string(attribute.size()) + ")");
  }
  if (!domain.bounded) {
    throw Error("key domain " + domain.id + " has no bin boundaries");
  }
  TKHist2D hist(std::move(key_column), std::move(attribute_column), domain.binning, binning);
  for (std::size_t row = 0; row < key.size(); ++row) {
    if (key.is_null(row)) {
      continue;
    }
    if (!domain.contains(key.integer(row))) {
      throw Error("key value " + std::to_string(key.integer(row)) + " outside domain " + domain.id);
    }
    hist.add_row(key.integer(row), attribute, row);
  }
  return hist;
}

TKHist2D build_table_level_hist(const ColumnData& attribute, const AttributeBinning& binning,
                                std::string attribute_column) {
  TKHist2D hist("", std::move(attribute_column), EquiWidthBinning{0.0, 1.0, 1}, binning);
  for (std::size_t row = 0; row < attribute.size(); ++row) {
    hist.add_row(std::nullopt, attribute, row);
  }
  return hist;
}

Count FrequencyHist::total() const {
  Count sum = 0;
  for (const auto& [value, count] : counts) {
    sum += count;
  }
  return sum;
}

FrequencyHist build_frequency_hist(const ColumnData& column) {
  FrequencyHist hist;
  for (std::size_t row = 0; row < column.size(); ++row) {
    if (!column.is_null(row)) {
      ++hist.counts[column.label(row)];
    }
  }
  return hist;
}

FrequencyHist build_frequency_hist(std::span<const std::string> values) {
  FrequencyHist hist;
  for (const auto& value : values) {
    ++hist.counts[value];
  }
  return hist;
}

}  // namespace tkhist
