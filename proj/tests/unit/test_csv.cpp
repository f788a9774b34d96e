#include <gtest/gtest.h>

#include <sstream>

#include "fasim/csv.hpp"
#include "fasim/error.hpp"

namespace fasim {
namespace {

CsvTable parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

TEST(Csv, ReadsHeaderAndValues) {
  const auto t = parse("\xEF\xBB\xBFy,\"a\", b\r\n1,2,3\n\n-1.5e2,+4,0.25\n");
  EXPECT_EQ(t.header, (std::vector<std::string>{"y", "a", "b"}));
  ASSERT_EQ(t.values.rows(), 2);
  EXPECT_DOUBLE_EQ(t.values(1, 0), -150.0);
  EXPECT_DOUBLE_EQ(t.values(1, 1), 4.0);
  EXPECT_DOUBLE_EQ(t.values(1, 2), 0.25);
}

TEST(Csv, ReportsLineOfBadRows) {
  try {
    parse("a,b\n1,2\n3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
  EXPECT_THROW(parse("a,b\n1,x\n"), Error);
  EXPECT_THROW(parse("a,b\n1,\n"), Error);
  EXPECT_THROW(parse(""), Error);
}

TEST(Csv, SplitsResponseByNameOrIndex) {
  const auto t = parse("a,y,b\n1,10,2\n3,30,4\n5,50,6\n");
  const Dataset by_name = dataset_from_table(t, {.name = "y"});
  EXPECT_EQ(by_name.p(), 2);
  EXPECT_DOUBLE_EQ(by_name.Y()[2], 50.0);
  EXPECT_DOUBLE_EQ(by_name.X()(2, 1), 6.0);
  EXPECT_EQ(by_name.name(1), "b");

  const Dataset by_index = dataset_from_table(t, {.index = 1});
  EXPECT_EQ(by_index.Y(), by_name.Y());
  EXPECT_EQ(by_index.X(), by_name.X());

  EXPECT_THROW(dataset_from_table(t, {.name = "z"}), Error);
  EXPECT_THROW(dataset_from_table(t, {.index = 3}), Error);
  EXPECT_THROW(dataset_from_table(t, {}), Error);
}

TEST(Csv, MissingFileIsInvalidInput) {
  try {
    read_csv_file("/nonexistent/file.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
}

}  // namespace
}  // namespace fasim
