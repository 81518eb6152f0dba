#include "tkhist/predicate.hpp"

#include <algorithm>
#include <cmath>

#include "tkhist/error.hpp"

namespace tkhist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_integral(double value) {
  return std::isfinite(value) && std::floor(value) == value;
}

// Text form of a literal when compared against categorical labels.
std::string literal_label(const Literal& literal) {
  if (!literal.is_number()) {
    return literal.as_text();
  }
  const double value = literal.as_number();
  if (is_integral(value) && std::fabs(value) < 1e15) {
    return std::to_string(static_cast<KeyValue>(value));
  }
  return format_real(value);
}

double operand(const Predicate& predicate, std::size_t index) {
  const auto& literal = predicate.operands.at(index);
  if (!literal.is_number()) {
    throw Error("predicate on " + predicate.column.qualified() + " compares a numeric value with text");
  }
  return literal.as_number();
}

std::vector<Range> merge(std::vector<Range> ranges) {
  std::sort(ranges.begin(), ranges.end(), [](const Range& a, const Range& b) { return a.lo < b.lo; });
  std::vector<Range> merged;
  for (const auto& range : ranges) {
    if (range.hi <= range.lo) {
      continue;
    }
    if (!merged.empty() && range.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, range.hi);
    } else {
      merged.push_back(range);
    }
  }
  return merged;
}

}  // namespace

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::kEq:
      return "=";
    case CompareOp::kLt:
      return "<";
    case CompareOp::kLe:
      return "<=";
    case CompareOp::kGt:
      return ">";
    case CompareOp::kGe:
      return ">=";
    case CompareOp::kBetween:
      return "BETWEEN";
    case CompareOp::kIn:
      return "IN";
  }
  return "=";
}

std::string Literal::to_sql() const {
  if (is_number()) {
    return literal_label(*this);
  }
  std::string out = "'";
  for (const char c : as_text()) {
    if (c == '\'') {
      out.push_back('\'');
    }
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

void validate_predicate(const Predicate& predicate) {
  const auto count = predicate.operands.size();
  switch (predicate.op) {
    case CompareOp::kBetween:
      if (count != 2) {
        throw Error("BETWEEN needs two operands");
      }
      if (predicate.operands[0].is_number() && predicate.operands[1].is_number() &&
          predicate.operands[0].as_number() > predicate.operands[1].as_number()) {
        throw Error("BETWEEN on " + predicate.column.qualified() + " has lower bound above upper bound");
      }
      break;
    case CompareOp::kIn:
      if (count == 0) {
        throw Error("IN needs at least one operand");
      }
      break;
    default:
      if (count != 1) {
        throw Error("comparison needs exactly one operand");
      }
  }
}

bool matches(const Predicate& predicate, double value) {
  switch (predicate.op) {
    case CompareOp::kEq:
      return value == operand(predicate, 0);
    case CompareOp::kLt:
      return value < operand(predicate, 0);
    case CompareOp::kLe:
      return value <= operand(predicate, 0);
    case CompareOp::kGt:
      return value > operand(predicate, 0);
    case CompareOp::kGe:
      return value >= operand(predicate, 0);
    case CompareOp::kBetween:
      return value >= operand(predicate, 0) && value <= operand(predicate, 1);
    case CompareOp::kIn:
      for (std::size_t i = 0; i < predicate.operands.size(); ++i) {
        if (value == operand(predicate, i)) {
          return true;
        }
      }
      return false;
  }
  return false;
}

bool matches(const Predicate& predicate, const std::string& value) {
  switch (predicate.op) {
    case CompareOp::kEq:
      return value == literal_label(predicate.operands.at(0));
    case CompareOp::kIn:
      return std::any_of(predicate.operands.begin(), predicate.operands.end(),
                         [&](const Literal& literal) { return literal_label(literal) == value; });
    default:
      throw Error("range predicate " + std::string(to_string(predicate.op)) + " on categorical column " +
                  predicate.column.qualified());
  }
}

bool matches(const Predicate& predicate, const ColumnData& column, std::size_t row) {
  if (column.is_null(row)) {
    return false;
  }
  if (column.kind() == ValueKind::kCategorical) {
    return matches(predicate, column.text(row));
  }
  return matches(predicate, column.numeric(row));
}

std::vector<Range> satisfying_ranges(const Predicate& predicate, bool integer_cells) {
  std::vector<Range> ranges;
  switch (predicate.op) {
    case CompareOp::kEq:
    case CompareOp::kIn:
      if (integer_cells) {
        for (std::size_t i = 0; i < predicate.operands.size(); ++i) {
          const double value = operand(predicate, i);
          if (is_integral(value)) {
            ranges.push_back(Range{value, value + 1.0});
          }
        }
      }
      break;
    case CompareOp::kLt: {
      const double c = operand(predicate, 0);
      ranges.push_back(Range{-kInf, integer_cells ? std::ceil(c) : c});
      break;
    }
    case CompareOp::kLe: {
      const double c = operand(predicate, 0);
      ranges.push_back(Range{-kInf, integer_cells ? std::floor(c) + 1.0 : c});
      break;
    }
    case CompareOp::kGt: {
      const double c = operand(predicate, 0);
      ranges.push_back(Range{integer_cells ? std::floor(c) + 1.0 : c, kInf});
      break;
    }
    case CompareOp::kGe: {
      const double c = operand(predicate, 0);
      ranges.push_back(Range{integer_cells ? std::ceil(c) : c, kInf});
      break;
    }
    case CompareOp::kBetween: {
      const double lo = operand(predicate, 0);
      const double hi = operand(predicate, 1);
      ranges.push_back(integer_cells ? Range{std::ceil(lo), std::floor(hi) + 1.0} : Range{lo, hi});
      break;
    }
  }
  return merge(std::move(ranges));
}

double covered_fraction(std::span<const Range> ranges, double lo, double hi) {
  if (hi <= lo) {
    return 0.0;
  }
  double covered = 0.0;
  for (const auto& range : ranges) {
    covered += std::max(0.0, std::min(hi, range.hi) - std::max(lo, range.lo));
  }
  return std::clamp(covered / (hi - lo), 0.0, 1.0);
}

bool intersects(const Predicate& predicate, double lo, double hi) {
  switch (predicate.op) {
    case CompareOp::kEq:
    case CompareOp::kIn:
      for (std::size_t i = 0; i < predicate.operands.size(); ++i) {
        const double value = operand(predicate, i);
        if (value >= lo && value <= hi) {
          return true;
        }
      }
      return false;
    case CompareOp::kLt:
      return lo < operand(predicate, 0);
    case CompareOp::kLe:
      return lo <= operand(predicate, 0);
    case CompareOp::kGt:
      return hi > operand(predicate, 0);
    case CompareOp::kGe:
      return hi >= operand(predicate, 0);
    case CompareOp::kBetween:
      return hi >= operand(predicate, 0) && lo <= operand(predicate, 1);
  }
  return true;
}

BinSelectivity selectivity_2d(const TKHist2D& hist, const Predicate& predicate) {
  if (predicate.column.column != hist.attribute_column()) {
    throw Error("predicate column " + predicate.column.qualified() + " does not match histogram attribute " +
                hist.attribute_column());
  }
  const auto& binning = hist.attribute_binning();
  std::vector<double> bin_fraction(hist.attribute_bins(), 0.0);
  if (binning.kind() == AttributeBinning::Kind::kEquiWidth) {
    const auto ranges = satisfying_ranges(predicate, binning.integer_cells());
    const auto& widths = binning.equi_width_binning();
    for (std::size_t j = 0; j < bin_fraction.size(); ++j) {
      bin_fraction[j] = covered_fraction(ranges, widths.lower(j), widths.upper(j));
    }
  } else {
    for (std::size_t j = 0; j < bin_fraction.size(); ++j) {
      const bool hit = binning.numeric_labels() ? matches(predicate, binning.label_value(j))
                                                : matches(predicate, binning.labels()[j]);
      bin_fraction[j] = hit ? 1.0 : 0.0;
    }
  }
  BinSelectivity result(hist.key_bins(), 1.0);
  for (std::size_t i = 0; i < result.size(); ++i) {
    const auto mass = hist.row_total(i) + hist.null_attributes(i);
    if (mass == 0) {
      continue;
    }
    double satisfied = 0.0;
    for (std::size_t j = 0; j < bin_fraction.size(); ++j) {
      satisfied += static_cast<double>(hist.at(i, j)) * bin_fraction[j];
    }
    result[i] = std::clamp(satisfied / static_cast<double>(mass), 0.0, 1.0);
  }
  return result;
}

BinSelectivity combine_table_selectivity(std::span<const BinSelectivity> fractions) {
  if (fractions.empty()) {
    throw Error("no selectivities to combine");
  }
  BinSelectivity result = fractions.front();
  for (std::size_t f = 1; f < fractions.size(); ++f) {
    if (fractions[f].size() != result.size()) {
      throw Error("selectivity length mismatch (" + std::to_string(fractions[f].size()) + " vs " +
                  std::to_string(result.size()) + ")");
    }
    for (std::size_t i = 0; i < result.size(); ++i) {
      result[i] *= fractions[f][i];
    }
  }
  return result;
}

double selectivity_categorical(const FrequencyHist& hist, const Predicate& predicate, Count total) {
  if (predicate.op != CompareOp::kEq && predicate.op != CompareOp::kIn) {
    throw Error("range predicate " + std::string(to_string(predicate.op)) + " on categorical column " +
                predicate.column.qualified());
  }
  if (total == 0) {
    return 0.0;
  }
  Count matching = 0;
  for (const auto& [value, count] : hist.counts) {
    if (matches(predicate, value)) {
      matching += count;
    }
  }
  return std::min(1.0, static_cast<double>(matching) / static_cast<double>(total));
}

CompositeHist apply_filters(const CompositeHist& composite, const BinSelectivity& fractions, bool scale_dominant) {
  if (fractions.size() != composite.bin_count()) {
    throw Error("selectivity has " + std::to_string(fractions.size()) + " bins, histogram over " +
                composite.domain_id() + " has " + std::to_string(composite.bin_count()));
  }
  CompositeHist result = composite;
  for (std::size_t i = 0; i < result.bin_count(); ++i) {
    auto& bin = result.bin(i);
    bin.background *= fractions[i];
    if (scale_dominant) {
      for (auto& [key, value] : bin.dominant) {
        value *= fractions[i];
      }
    }
  }
  return result;
}

CompositeHist restrict_key(const CompositeHist& composite, const Predicate& predicate) {
  const auto ranges = satisfying_ranges(predicate, true);
  CompositeHist result = composite;
  const auto& binning = result.binning();
  for (std::size_t i = 0; i < result.bin_count(); ++i) {
    auto& bin = result.bin(i);
    const double fraction = covered_fraction(ranges, binning.lower(i), binning.upper(i));
    bin.background *= fraction;
    bin.ndv *= fraction;
    std::erase_if(bin.dominant,
                  [&](const auto& entry) { return !matches(predicate, static_cast<double>(entry.first)); });
  }
  return result;
}

}  // namespace tkhist
