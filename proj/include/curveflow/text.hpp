#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curveflow::text {

// Shortest decimal form that parses back to the same double.
std::string format_number(double value);
std::optional<double> parse_number(std::string_view text);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace curveflow::text
