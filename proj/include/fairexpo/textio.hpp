#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fairexpo {

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

// Strict numeric parsing; the whole string must be consumed.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);
bool try_parse_double(std::string_view text, double* out);
bool try_parse_int(std::string_view text, long long* out);

std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char delimiter);
std::string join(const std::vector<std::string>& parts, char delimiter);

std::string read_file(const std::string& path);
std::vector<std::string> read_lines(const std::string& path);
void write_file(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);

std::uint64_t fnv1a(std::string_view text);

// Timestamps are epoch seconds; the textual form is "YYYY-MM-DDTHH:MM:SS"
// in UTC. Parsing also accepts a space separator and bare epoch integers.
std::int64_t parse_timestamp(std::string_view text);
bool try_parse_timestamp(std::string_view text, std::int64_t* out);
std::string format_timestamp(std::int64_t epoch_seconds);

}  // namespace fairexpo
