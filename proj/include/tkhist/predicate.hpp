#pragma once

#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tkhist/catalog.hpp"
#include "tkhist/histogram.hpp"
#include "tkhist/join.hpp"

namespace tkhist {

enum class CompareOp { kEq, kLt, kLe, kGt, kGe, kBetween, kIn };

std::string_view to_string(CompareOp op);

struct Literal {
  std::variant<double, std::string> value;

  static Literal number(double v) { return Literal{v}; }
  static Literal text(std::string v) { return Literal{std::move(v)}; }
  bool is_number() const { return std::holds_alternative<double>(value); }
  double as_number() const { return std::get<double>(value); }
  const std::string& as_text() const { return std::get<std::string>(value); }
  std::string to_sql() const;

  bool operator==(const Literal&) const = default;
};

// A filter on one column. `column.table` holds the alias in queries. BETWEEN has two operands,
// IN one or more, everything else one.
struct Predicate {
  ColumnRef column;
  CompareOp op = CompareOp::kEq;
  std::vector<Literal> operands;

  bool operator==(const Predicate&) const = default;
};

void validate_predicate(const Predicate& predicate);

// Row-level evaluation, shared by the oracle and the correlation scan.
bool matches(const Predicate& predicate, double value);
bool matches(const Predicate& predicate, const std::string& value);
bool matches(const Predicate& predicate, const ColumnData& column, std::size_t row);

// Half-open numeric range [lo, hi).
struct Range {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

// Portion of the number line satisfying a numeric predicate. With integer_cells every integer v
// owns [v, v + 1); otherwise points have zero measure.
std::vector<Range> satisfying_ranges(const Predicate& predicate, bool integer_cells);
// Fraction of [lo, hi) covered by the ranges.
double covered_fraction(std::span<const Range> ranges, double lo, double hi);
// True if some value in [lo, hi] (closed) satisfies the predicate.
bool intersects(const Predicate& predicate, double lo, double hi);

// Per key-bin fraction in [0, 1].
using BinSelectivity = std::vector<double>;

BinSelectivity selectivity_2d(const TKHist2D& hist, const Predicate& predicate);
BinSelectivity combine_table_selectivity(std::span<const BinSelectivity> fractions);
double selectivity_categorical(const FrequencyHist& hist, const Predicate& predicate, Count total);

// Scales background estimates per bin. Dominant paths stay whole unless scale_dominant is set.
CompositeHist apply_filters(const CompositeHist& composite, const BinSelectivity& fractions,
                            bool scale_dominant = false);

// Applies a predicate on the join key itself: failing dominant keys are dropped, and background
// NV and NDV are scaled by the covered share of each key bin.
CompositeHist restrict_key(const CompositeHist& composite, const Predicate& predicate);

}  // namespace tkhist
