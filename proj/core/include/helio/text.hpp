#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace helio {

/// Shortest text that parses back to the same double.
std::string format_double(double value);
/// Always 17 significant digits; used by the model file formats.
std::string format_double17(double value);

/// Strict decimal parse of the whole field; throws on trailing garbage.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::string_view trim(std::string_view text);

/// Splits one CSV record on commas. Surrounding whitespace and double quotes are stripped.
std::vector<std::string> split_csv_line(std::string_view line);
std::vector<std::string> split_list(std::string_view text, char sep = ',');
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace helio
