#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tracekit::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_icase(std::string_view s, std::string_view prefix);

// Splits on '\n'; a trailing '\r' on each line is dropped.
std::vector<std::string_view> split_lines(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Locale-independent strict parse of the whole (trimmed) string.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Shortest representation that parses back to the same double.
std::string format_shortest(double v);
// Like format_shortest but always carries a decimal point ("0.0", "2.5", "1e-05").
std::string format_decimal(double v);
// Fixed `digits` decimals with trailing zeros (and a bare '.') stripped.
std::string format_trimmed(double v, int digits);

// For a line such as "Answer: `B`" or "**Answer:** B" returns the text after the colon.
std::optional<std::string_view> answer_line_payload(std::string_view line);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace tracekit::text
