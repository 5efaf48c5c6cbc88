#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kinc::io {

// Nine significant digits, the fixed precision of every numeric CLI output.
std::string fmt9(double value);

// Shortest representation that parses back to the identical double.
std::string fmt_exact(double value);

double parse_double(std::string_view text);
long long parse_int(std::string_view text);

// Splits one CSV record on commas and trims surrounding whitespace and a
// trailing CR. No quoting support; none of the formats need it.
std::vector<std::string_view> split_csv_line(std::string_view line);

std::string read_file(const std::filesystem::path& path);

// Writes via a sibling temporary file and renames it into place, so readers
// never see a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace kinc::io
