#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tkhist::csv {

// Reads one RFC-4180 record; returns nullopt at end of input. Quoted fields may span lines.
std::optional<std::vector<std::string>> read_record(std::istream& in);

std::string escape_field(std::string_view field);
void write_record(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace tkhist::csv
