#include <gtest/gtest.h>

#include <sstream>

#include "tkhist/csv.hpp"

namespace tkhist::csv {
namespace {

TEST(CsvTest, QuotedFieldsAndCrlf) {
  std::istringstream in("a,\"b,c\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",,x\r\n");
  const auto first = read_record(in);
  ASSERT_TRUE(first);
  EXPECT_EQ(*first, (std::vector<std::string>{"a", "b,c", "say \"hi\""}));
  const auto second = read_record(in);
  ASSERT_TRUE(second);
  EXPECT_EQ(*second, (std::vector<std::string>{"multi\nline", "", "x"}));
  EXPECT_FALSE(read_record(in));
}

TEST(CsvTest, WriteThenReadRoundTrips) {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "", "line\nbreak"};
  std::ostringstream out;
  write_record(out, fields);
  EXPECT_EQ(out.str().substr(out.str().size() - 2), "\r\n");
  std::istringstream in(out.str());
  EXPECT_EQ(read_record(in), fields);
}

TEST(CsvTest, EscapeOnlyWhenNeeded) {
  EXPECT_EQ(escape_field("abc"), "abc");
  EXPECT_EQ(escape_field("a,b"), "\"a,b\"");
  EXPECT_EQ(escape_field("a\"b"), "\"a\"\"b\"");
}

}  // namespace
}  // namespace tkhist::csv
