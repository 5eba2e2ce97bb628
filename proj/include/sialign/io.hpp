#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sialign {

std::string read_file(const std::filesystem::path& path);
// Lines without terminators; a trailing '\r' is dropped.
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Write to a sibling temp file, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Shortest decimal that round-trips the double.
std::string format_double(double v);
double parse_double(std::string_view s);  // throws std::invalid_argument
long parse_long(std::string_view s);      // throws std::invalid_argument

}  // namespace sialign
