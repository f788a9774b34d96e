#include "fasim/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <string_view>

#include "fasim/error.hpp"

namespace fasim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<std::vector<double>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto cells = split_cells(view);
    if (!have_header) {
      for (const auto cell : cells) table.header.push_back(unquote(cell));
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw_invalid("csv row " + std::to_string(line_no) + " has " +
                    std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(table.header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], row[c])) {
        throw_invalid("csv row " + std::to_string(line_no) + ": cannot parse cell '" +
                      std::string(cells[c]) + "' in column '" + table.header[c] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw_invalid("csv input is empty");

  table.values.resize(static_cast<Index>(rows.size()),
                      static_cast<Index>(table.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_invalid("cannot open input file '" + path + "'");
  return read_csv(in);
}

Dataset dataset_from_table(const CsvTable& table, const ResponseColumn& response) {
  const Index cols = static_cast<Index>(table.header.size());
  Index target = -1;
  if (response.name) {
    for (Index c = 0; c < cols; ++c) {
      if (table.header[static_cast<std::size_t>(c)] == *response.name) {
        target = c;
        break;
      }
    }
    if (target < 0) throw_invalid("response column '" + *response.name + "' not found");
  } else if (response.index) {
    target = *response.index;
    if (target < 0 || target >= cols) {
      throw_invalid("response index " + std::to_string(target) + " out of range");
    }
  } else {
    throw_invalid("no response column given");
  }
  if (cols < 2) throw_invalid("csv needs a response and at least one covariate");

  Matrix X(table.values.rows(), cols - 1);
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(cols - 1));
  Index out = 0;
  for (Index c = 0; c < cols; ++c) {
    if (c == target) continue;
    X.col(out++) = table.values.col(c);
    names.push_back(table.header[static_cast<std::size_t>(c)]);
  }
  return Dataset(std::move(X), table.values.col(target), std::move(names));
}

}  // namespace fasim
