#include "perfplan/io/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "perfplan/errors.hpp"

namespace perfplan::io {

namespace {

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  return text;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("cannot parse " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

double parse_fraction(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.back() == '%') {
    text.remove_suffix(1);
    return parse_double(text, "percentage") / 100.0;
  }
  return parse_double(text, "fraction");
}

double parse_flops(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ParseError("cannot parse flops: empty value");
  double scale = 1.0;
  switch (std::tolower(static_cast<unsigned char>(text.back()))) {
    case 'k': scale = 1e3; break;
    case 'm': scale = 1e6; break;
    case 'g': scale = 1e9; break;
    case 't': scale = 1e12; break;
    case 'p': scale = 1e15; break;
    default: break;
  }
  if (scale != 1.0) text.remove_suffix(1);
  const double value = parse_double(text, "flops") * scale;
  if (!(value > 0) || !std::isfinite(value)) {
    throw ParseError("flops value must be finite and > 0");
  }
  return value;
}

std::string format_double(double value) {
  std::array<char, 64> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc{}) return "nan";
  return {buffer.data(), ptr};
}

namespace {

std::string scaled(double value, double unit, const char* suffix) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g %s", value / unit, suffix);
  return buffer;
}

}  // namespace

std::string format_flops(double flops) {
  if (flops >= 1e15) return scaled(flops, 1e15, "PFlops");
  if (flops >= 1e12) return scaled(flops, 1e12, "TFlops");
  if (flops >= 1e9) return scaled(flops, 1e9, "GFlops");
  if (flops >= 1e6) return scaled(flops, 1e6, "MFlops");
  return scaled(flops, 1.0, "Flops");
}

std::string format_bytes(std::uint64_t bytes) {
  const double value = static_cast<double>(bytes);
  constexpr double kKiB = 1024.0;
  constexpr double kMiB = kKiB * 1024.0;
  constexpr double kGiB = kMiB * 1024.0;
  constexpr double kTiB = kGiB * 1024.0;
  constexpr double kPiB = kTiB * 1024.0;
  if (value >= kPiB) return scaled(value, kPiB, "PiB");
  if (value >= kTiB) return scaled(value, kTiB, "TiB");
  if (value >= kGiB) return scaled(value, kGiB, "GiB");
  if (value >= kMiB) return scaled(value, kMiB, "MiB");
  if (value >= kKiB) return scaled(value, kKiB, "KiB");
  return scaled(value, 1.0, "B");
}

}  // namespace perfplan::io
