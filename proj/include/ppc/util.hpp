#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ppc {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
bool iequals(std::string_view a, std::string_view b);
// Case-insensitive (ASCII) substring test.
bool icontains(std::string_view haystack, std::string_view needle);

// Reads a whole file; throws ppc::Error when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);
// Strict parse of a finite double; the whole field must be consumed.
bool parse_double(std::string_view s, double& out);

}  // namespace ppc
