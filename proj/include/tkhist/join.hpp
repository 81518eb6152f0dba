#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tkhist/histogram.hpp"

namespace tkhist {

using KeySet = std::unordered_set<KeyValue>;

// One bin of an intermediate join result: estimated counts of the dominant join paths plus a
// Selinger-style background summary.
struct CompositeBin {
  std::unordered_map<KeyValue, double> dominant;
  double background = 0.0;
  double ndv = 0.0;

  double bac() const { return ndv > 0.0 ? background / ndv : 0.0; }
  double dominant_total() const;
  double estimate() const { return background + dominant_total(); }
};

class CompositeHist {
 public:
  CompositeHist() = default;
  CompositeHist(std::string domain_id, EquiWidthBinning binning);

  const std::string& domain_id() const { return domain_id_; }
  const EquiWidthBinning& binning() const { return binning_; }
  std::size_t bin_count() const { return bins_.size(); }
  const CompositeBin& bin(std::size_t index) const { return bins_.at(index); }
  CompositeBin& bin(std::size_t index) { return bins_.at(index); }
  const std::vector<std::string>& provenance() const { return provenance_; }
  std::vector<std::string>& provenance() { return provenance_; }

  double total() const;
  bool same_domain(const CompositeHist& other) const;

 private:
  std::string domain_id_;
  EquiWidthBinning binning_;
  std::vector<CompositeBin> bins_;
  std::vector<std::string> provenance_;
};

// Identity lift of a single-table histogram; the container becomes the dominant map.
CompositeHist lift(const TKHist1D& hist, const std::string& table);

// |A|·|B| / max(NDV_A, NDV_B); zero when either side is empty.
double selinger_bin_estimate(double nv_a, double ndv_a, double nv_b, double ndv_b);

double propagate_ndv(double ndv_a, double ndv_b);

// Bin-wise join of two histograms over the same key domain. Keys in `excluded` contribute nothing.
CompositeHist jtkh_join(const CompositeHist& a, const CompositeHist& b, const KeySet& excluded = {});
CompositeHist jtkh_join(const TKHist1D& a, const TKHist1D& b, const KeySet& excluded = {});

// Left fold of jtkh_join over the group, in the given order.
CompositeHist join_star_group(std::span<const CompositeHist> hists, const KeySet& excluded = {});

// Moves a composite over key1 onto key2 through the bridge table's (key1, key2) grid. Only the
// background survives the translation.
CompositeHist chain_translate(const CompositeHist& composite, const TKHist2D& bridge, const TKHist1D& key2_hist);

}  // namespace tkhist
