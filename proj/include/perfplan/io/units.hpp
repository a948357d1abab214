#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace perfplan::io {

/// "0.01" -> 0.01 and "1%" -> 0.01. Percent handling ends here; core code
/// only ever sees fractions.
double parse_fraction(std::string_view text);

/// Plain doubles plus K/M/G/T/P suffixes (case-insensitive):
/// "2.1504e12", "1.8T" and "0.237P" all parse.
double parse_flops(std::string_view text);

/// Shortest representation that round-trips exactly (std::to_chars).
std::string format_double(double value);

/// Human-facing rate, e.g. "307.507 TFlops".
std::string format_flops(double flops);

/// Human-facing size in binary units, e.g. "47 TiB".
std::string format_bytes(std::uint64_t bytes);

}  // namespace perfplan::io
