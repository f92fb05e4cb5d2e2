#include "twosample/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twosample {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_cell(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::runtime_error parse_error(std::string_view source, std::size_t line,
                               const std::string& what) {
  return std::runtime_error(std::string(source) + ":" + std::to_string(line) +
                            ": " + what);
}

}  // namespace

Sample parse_sample_csv(std::istream& in, std::string_view source) {
  std::vector<double> data;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first_content = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    const auto cells = split(content);
    std::vector<double> row;
    row.reserve(cells.size());
    std::optional<std::string_view> bad;
    for (auto cell : cells) {
      if (auto v = parse_cell(cell)) {
        row.push_back(*v);
      } else if (!bad) {
        bad = trim(cell);
      }
    }
    if (bad) {
      if (first_content) {
        first_content = false;  // header
        continue;
      }
      throw parse_error(source, line_no,
                        "non-numeric cell '" + std::string(*bad) + "'");
    }
    first_content = false;
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw parse_error(source, line_no, "non-finite value");
      }
    }
    if (rows == 0) {
      dim = row.size();
    } else if (row.size() != dim) {
      throw parse_error(source, line_no,
                        "ragged row: expected " + std::to_string(dim) +
                            " columns, found " + std::to_string(row.size()));
    }
    data.insert(data.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) {
    throw std::runtime_error(std::string(source) + ": no observations");
  }
  PointMatrix points(static_cast<Eigen::Index>(rows),
                     static_cast<Eigen::Index>(dim));
  std::copy(data.begin(), data.end(), points.data());
  return Sample(std::move(points));
}

Sample ingest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_sample_csv(in, path.string());
}

}  // namespace twosample
