#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tkhist/join.hpp"

namespace tkhist {

struct Envelope {
  double min = 0.0;
  double max = 0.0;

  bool operator==(const Envelope&) const = default;
};

// Attribute values observed together with each dominant join key of one table column.
struct AttributeCorrelation {
  std::string domain_id;
  bool categorical = false;
  std::map<KeyValue, Envelope> envelopes;               // numeric attributes
  std::map<KeyValue, std::set<std::string>> values;     // categorical attributes

  bool operator==(const AttributeCorrelation&) const = default;
};

struct CorrelationKey {
  std::string table;
  std::string key_column;
  std::string attribute;

  auto operator<=>(const CorrelationKey&) const = default;
};

struct CorrelationMap {
  std::map<std::string, std::vector<KeyValue>> dominant_keys;  // per key domain, sorted
  std::map<CorrelationKey, AttributeCorrelation> entries;

  bool empty() const { return entries.empty(); }
  bool operator==(const CorrelationMap&) const = default;
};

// Dominant keys to drop from each key domain.
using ExclusionSet = std::map<std::string, KeySet>;

}  // namespace tkhist
