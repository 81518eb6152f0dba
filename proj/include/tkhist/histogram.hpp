#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tkhist/catalog.hpp"

namespace tkhist {

using Count = std::uint64_t;

// Exact frequencies of the (at most k) most frequent keys of one bin.
class TopKContainer {
 public:
  explicit TopKContainer(std::size_t capacity = 0) : capacity_(capacity) {}

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(KeyValue key) const { return entries_.contains(key); }
  Count frequency(KeyValue key) const;
  Count total() const;

  // Adds a new key; throws when full or when the key is already present.
  void insert(KeyValue key, Count frequency);
  // Increments a stored key; returns false if the key is not stored.
  bool increment(KeyValue key);

  const std::unordered_map<KeyValue, Count>& entries() const { return entries_; }
  std::vector<std::pair<KeyValue, Count>> sorted_entries() const;

  bool operator==(const TopKContainer&) const = default;

 private:
  std::size_t capacity_;
  std::unordered_map<KeyValue, Count> entries_;
};

struct Bin1D {
  TopKContainer container;
  Count nv = 0;
  // Distinct background values seen so far; NDV is its size.
  std::unordered_set<KeyValue> background;

  Count ndv() const { return background.size(); }
  double bac() const { return ndv() == 0 ? 0.0 : static_cast<double>(nv) / static_cast<double>(ndv()); }
  Count total() const { return nv + container.total(); }

  bool operator==(const Bin1D&) const = default;
};

struct BinStats {
  Count nv = 0;
  Count ndv = 0;
  double bac = 0.0;
  const TopKContainer* container = nullptr;
};

class TKHist1D {
 public:
  TKHist1D() = default;
  TKHist1D(std::string domain_id, EquiWidthBinning binning, KeyValue min, KeyValue max, std::size_t k);

  const std::string& domain_id() const { return domain_id_; }
  const EquiWidthBinning& binning() const { return binning_; }
  std::size_t bin_count() const { return bins_.size(); }
  std::size_t k() const { return k_; }
  KeyValue min_key() const { return min_key_; }
  KeyValue max_key() const { return max_key_; }
  const Bin1D& bin(std::size_t index) const { return bins_.at(index); }
  Count total_rows() const;
  std::size_t locate(KeyValue key) const;

  BinStats bin_stats(std::size_t index) const;
  // Counts a newly inserted tuple. Container membership is fixed at build time.
  void insert(KeyValue key);

  // Used by the builder and the state loader.
  std::vector<Bin1D>& mutable_bins() { return bins_; }

  bool operator==(const TKHist1D&) const = default;

 private:
  std::string domain_id_;
  EquiWidthBinning binning_;
  KeyValue min_key_ = 0;
  KeyValue max_key_ = 0;
  std::size_t k_ = 0;
  std::vector<Bin1D> bins_;
};

TKHist1D build_tkhist1d(const ColumnData& column, const KeyDomain& domain, std::size_t k);
TKHist1D build_tkhist1d(std::span<const KeyValue> values, const KeyDomain& domain, std::size_t k);

// Binning of the attribute axis of a 2D histogram: equi-width for numeric columns, one bin per
// distinct value for categorical ones.
class AttributeBinning {
 public:
  enum class Kind { kEquiWidth, kDiscrete };

  AttributeBinning() = default;
  // Integer columns use unit cells, i.e. the value v covers [v, v + 1).
  static AttributeBinning equi_width(EquiWidthBinning binning, bool integer_cells);
  static AttributeBinning discrete(std::vector<std::string> labels, bool numeric_labels);

  Kind kind() const { return kind_; }
  bool integer_cells() const { return integer_cells_; }
  bool numeric_labels() const { return numeric_labels_; }
  const EquiWidthBinning& equi_width_binning() const { return binning_; }
  const std::vector<std::string>& labels() const { return labels_; }
  // Numeric value of a discrete label; only valid when numeric_labels().
  double label_value(std::size_t bin) const { return label_values_.at(bin); }
  std::size_t count() const { return kind_ == Kind::kEquiWidth ? binning_.count : labels_.size(); }

  // Bin of a column value, or nullopt when an unseen discrete label is given.
  std::optional<std::size_t> locate(const ColumnData& column, std::size_t row) const;
  std::optional<std::size_t> find_label(const std::string& label) const;
  std::size_t add_label(const std::string& label);

  bool operator==(const AttributeBinning& other) const {
    return kind_ == other.kind_ && integer_cells_ == other.integer_cells_ &&
           numeric_labels_ == other.numeric_labels_ && binning_ == other.binning_ && labels_ == other.labels_;
  }

 private:
  Kind kind_ = Kind::kEquiWidth;
  bool integer_cells_ = false;
  bool numeric_labels_ = false;
  EquiWidthBinning binning_;
  std::vector<std::string> labels_;
  std::vector<double> label_values_;
  std::unordered_map<std::string, std::size_t> label_index_;
};

// Derives the attribute binning of a column: discrete for categorical columns, otherwise
// equi-width over the observed range (or over the key domain when the column is a domain member).
AttributeBinning make_attribute_binning(const ColumnData& column, ColumnClass column_class, std::size_t bins,
                                        const KeyDomain* domain);

// Count grid over key bins x attribute bins. An empty key column name denotes the table-level
// histogram, which has a single key bin holding every row.
class TKHist2D {
 public:
  TKHist2D() = default;
  TKHist2D(std::string key_column, std::string attribute_column, EquiWidthBinning key_binning,
           AttributeBinning attribute_binning);

  const std::string& key_column() const { return key_column_; }
  const std::string& attribute_column() const { return attribute_column_; }
  bool table_level() const { return key_column_.empty(); }
  const EquiWidthBinning& key_binning() const { return key_binning_; }
  const AttributeBinning& attribute_binning() const { return attribute_binning_; }
  std::size_t key_bins() const { return key_binning_.count; }
  std::size_t attribute_bins() const { return attribute_binning_.count(); }

  Count at(std::size_t key_bin, std::size_t attribute_bin) const;
  Count row_total(std::size_t key_bin) const;
  Count null_attributes(std::size_t key_bin) const { return null_attributes_.at(key_bin); }
  Count total() const;

  void add(std::size_t key_bin, std::size_t attribute_bin, Count count = 1);
  void add_null_attribute(std::size_t key_bin, Count count = 1) { null_attributes_.at(key_bin) += count; }
  // Appends a column for a new discrete label.
  std::size_t add_label(const std::string& label);
  // Counts one row; key is ignored for table-level histograms. Null keys are skipped.
  void add_row(std::optional<KeyValue> key, const ColumnData& attribute, std::size_t row);

  bool operator==(const TKHist2D&) const = default;

 private:
  std::string key_column_;
  std::string attribute_column_;
  EquiWidthBinning key_binning_;
  AttributeBinning attribute_binning_;
  std::vector<std::vector<Count>> grid_;
  std::vector<Count> null_attributes_;
};

TKHist2D build_tkhist2d(const ColumnData& key, const ColumnData& attribute, const KeyDomain& domain,
                        const AttributeBinning& binning, std::string key_column, std::string attribute_column);
TKHist2D build_table_level_hist(const ColumnData& attribute, const AttributeBinning& binning,
                                std::string attribute_column);

// Exact count of every distinct categorical value.
struct FrequencyHist {
  std::map<std::string, Count> counts;

  Count total() const;
  bool operator==(const FrequencyHist&) const = default;
};

FrequencyHist build_frequency_hist(const ColumnData& column);
FrequencyHist build_frequency_hist(std::span<const std::string> values);

}  // namespace tkhist
