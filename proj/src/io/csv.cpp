#include "perfplan/io/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "perfplan/errors.hpp"
#include "perfplan/io/units.hpp"

namespace perfplan::io {

namespace {

constexpr std::string_view kTimingHeader = "n_units,wall_time_hours,censored";

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw ParseError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

std::string_view strip(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() &&
         (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  return text;
}

bool skippable(std::string_view line) { return line.empty() || line.front() == '#'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(strip(line.substr(start)));
      return fields;
    }
    fields.push_back(strip(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::int64_t parse_int(std::string_view field, std::string_view source, std::size_t line,
                       std::string_view what) {
  std::int64_t value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    fail(source, line, "cannot parse " + std::string(what) + ": '" + std::string(field) + "'");
  }
  return value;
}

double parse_real(std::string_view field, std::string_view source, std::size_t line,
                  std::string_view what) {
  double value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    fail(source, line, "cannot parse " + std::string(what) + ": '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<TimingObservation> read_timings_csv(std::istream& in, std::string_view source) {
  std::vector<TimingObservation> observations;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip(raw);
    if (skippable(line)) continue;

    if (!header_seen) {
      if (line != kTimingHeader) {
        fail(source, line_no,
             "expected header '" + std::string(kTimingHeader) + "', got '" + std::string(line) + "'");
      }
      header_seen = true;
      continue;
    }

    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      fail(source, line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    }

    TimingObservation obs;
    obs.n_units = parse_int(fields[0], source, line_no, "n_units");
    obs.wall_time_hours = parse_real(fields[1], source, line_no, "wall_time_hours");
    if (fields[2] == "0") {
      obs.censored = false;
    } else if (fields[2] == "1") {
      obs.censored = true;
    } else {
      fail(source, line_no, "censored must be 0 or 1, got '" + std::string(fields[2]) + "'");
    }
    if (obs.n_units < 1) fail(source, line_no, "n_units must be >= 1");
    if (!(obs.wall_time_hours > 0)) fail(source, line_no, "wall_time_hours must be > 0");
    observations.push_back(obs);
  }

  if (!header_seen) {
    throw ParseError(std::string(source) + ": missing header '" + std::string(kTimingHeader) + "'");
  }
  return observations;
}

std::vector<TimingObservation> read_timings_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_timings_csv(in, path.string());
}

void write_timings_csv(std::ostream& out, std::span<const TimingObservation> observations) {
  out << kTimingHeader << '\n';
  for (const auto& obs : observations) {
    out << obs.n_units << ',' << format_double(obs.wall_time_hours) << ','
        << (obs.censored ? '1' : '0') << '\n';
  }
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint<double>> points) {
  out << "n,speedup,predicted_time_hours\n";
  for (const auto& p : points) {
    out << p.n_units << ',' << format_double(p.speedup) << ',';
    if (p.predicted_time_hours) out << format_double(*p.predicted_time_hours);
    out << '\n';
  }
}

}  // namespace perfplan::io
