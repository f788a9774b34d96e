#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fasim/data.hpp"

namespace fasim {

/// Numeric table read from a comma-separated file with a header row.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

/// Parses UTF-8 CSV with '.' decimals. Blank lines are skipped; a row with a
/// wrong cell count or an unparsable cell raises InvalidInput naming the
/// 1-based line number.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Which column holds the response: a header name or a 0-based index.
struct ResponseColumn {
  std::optional<std::string> name;
  std::optional<Index> index;
};

/// Splits a table into X (all other columns, in file order) and Y.
Dataset dataset_from_table(const CsvTable& table, const ResponseColumn& response);

}  // namespace fasim
