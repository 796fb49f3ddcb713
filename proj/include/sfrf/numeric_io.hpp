#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace sfrf {

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace sfrf
