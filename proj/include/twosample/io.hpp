#pragma once

#include "twosample/sample.hpp"

#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace twosample {

/// Reads a numeric CSV, one observation per row. A first row containing a
/// non-numeric cell is taken as a header. Blank lines are skipped. Errors
/// (ragged rows, bad cells, no data) name the offending line.
Sample parse_sample_csv(std::istream& in, std::string_view source = "<input>");

Sample ingest(const std::filesystem::path& path);

}  // namespace twosample
