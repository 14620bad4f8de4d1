#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace uiground {

// Shortest text that round-trips the value exactly (std::to_chars).
std::string format_double(double v);
std::string format_float(float v);

double parse_double(const std::string& s);
float parse_float(const std::string& s);

// Writes to <path>.tmp then renames over <path>; throws Error(IoFailure).
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

// Minimal CSV: fields are quoted only when they contain ',', '"' or '\n'.
std::string csv_escape(const std::string& field);
std::vector<std::string> csv_split_line(const std::string& line);

} // namespace uiground
