#include "tkhist/join.hpp"

#include <algorithm>

#include "tkhist/error.hpp"

namespace tkhist {

double CompositeBin::dominant_total() const {
  double sum = 0.0;
  for (const auto& [key, value] : dominant) {
    sum += value;
  }
  return sum;
}

CompositeHist::CompositeHist(std::string domain_id, EquiWidthBinning binning)
    : domain_id_(std::move(domain_id)), binning_(binning), bins_(binning.count) {}

double CompositeHist::total() const {
  double sum = 0.0;
  for (const auto& bin : bins_) {
    sum += bin.estimate();
  }
  return sum;
}

bool CompositeHist::same_domain(const CompositeHist& other) const {
  return domain_id_ == other.domain_id_ && binning_ == other.binning_;
}

CompositeHist lift(const TKHist1D& hist, const std::string& table) {
  CompositeHist result(hist.domain_id(), hist.binning());
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    const auto& source = hist.bin(i);
    auto& target = result.bin(i);
    for (const auto& [key, frequency] : source.container.entries()) {
      target.dominant.emplace(key, static_cast<double>(frequency));
    }
    target.background = static_cast<double>(source.nv);
    target.ndv = static_cast<double>(source.ndv());
  }
  result.provenance().push_back(table);
  return result;
}

double selinger_bin_estimate(double nv_a, double ndv_a, double nv_b, double ndv_b) {
  if (nv_a <= 0.0 || nv_b <= 0.0 || ndv_a <= 0.0 || ndv_b <= 0.0) {
    return 0.0;
  }
  return nv_a * nv_b / std::max(ndv_a, ndv_b);
}

double propagate_ndv(double ndv_a, double ndv_b) {
  return std::min(ndv_a, ndv_b);
}

CompositeHist jtkh_join(const CompositeHist& a, const CompositeHist& b, const KeySet& excluded) {
  if (!a.same_domain(b)) {
    throw Error("cannot join histograms over different key domains (" + a.domain_id() + " vs " + b.domain_id() +
                ")");
  }
  CompositeHist result(a.domain_id(), a.binning());
  for (std::size_t i = 0; i < a.bin_count(); ++i) {
    const auto& bin_a = a.bin(i);
    const auto& bin_b = b.bin(i);
    auto& out = result.bin(i);
    out.background = selinger_bin_estimate(bin_a.background, bin_a.ndv, bin_b.background, bin_b.ndv);
    out.ndv = propagate_ndv(bin_a.ndv, bin_b.ndv);
    const double bac_a = bin_a.bac();
    const double bac_b = bin_b.bac();
    for (const auto& [key, count_a] : bin_a.dominant) {
      if (excluded.contains(key)) {
        continue;
      }
      const auto match = bin_b.dominant.find(key);
      out.dominant.emplace(key, match != bin_b.dominant.end() ? count_a * match->second : count_a * bac_b);
    }
    for (const auto& [key, count_b] : bin_b.dominant) {
      if (excluded.contains(key) || bin_a.dominant.contains(key)) {
        continue;
      }
      out.dominant.emplace(key, count_b * bac_a);
    }
  }
  result.provenance() = a.provenance();
  result.provenance().insert(result.provenance().end(), b.provenance().begin(), b.provenance().end());
  return result;
}

CompositeHist jtkh_join(const TKHist1D& a, const TKHist1D& b, const KeySet& excluded) {
  return jtkh_join(lift(a, "a"), lift(b, "b"), excluded);
}

CompositeHist join_star_group(std::span<const CompositeHist> hists, const KeySet& excluded) {
  if (hists.empty()) {
    throw Error("cannot join an empty group");
  }
  CompositeHist result = hists.front();
  for (std::size_t i = 1; i < hists.size(); ++i) {
    result = jtkh_join(result, hists[i], excluded);
  }
  return result;
}

CompositeHist chain_translate(const CompositeHist& composite, const TKHist2D& bridge, const TKHist1D& key2_hist) {
  if (!(composite.binning() == bridge.key_binning())) {
    throw Error("bridge histogram " + bridge.key_column() + "x" + bridge.attribute_column() +
                " does not share the key bins of domain " + composite.domain_id());
  }
  const auto& attribute = bridge.attribute_binning();
  if (attribute.kind() != AttributeBinning::Kind::kEquiWidth ||
      !(attribute.equi_width_binning() == key2_hist.binning())) {
    throw Error("bridge histogram attribute axis does not match domain " + key2_hist.domain_id());
  }
  CompositeHist result(key2_hist.domain_id(), key2_hist.binning());
  for (std::size_t i = 0; i < composite.bin_count(); ++i) {
    const double mass = composite.bin(i).estimate();
    const auto row_total = bridge.row_total(i);
    if (mass <= 0.0 || row_total == 0) {
      continue;
    }
    for (std::size_t j = 0; j < bridge.attribute_bins(); ++j) {
      const auto cell = bridge.at(i, j);
      if (cell != 0) {
        result.bin(j).background += mass * static_cast<double>(cell) / static_cast<double>(row_total);
      }
    }
  }
  for (std::size_t j = 0; j < result.bin_count(); ++j) {
    auto& bin = result.bin(j);
    if (bin.background > 0.0) {
      const auto& source = key2_hist.bin(j);
      bin.ndv = static_cast<double>(source.ndv() + source.container.size());
    }
  }
  result.provenance() = composite.provenance();
  return result;
}

}  // namespace tkhist
