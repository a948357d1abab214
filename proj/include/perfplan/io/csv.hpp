#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "perfplan/fitting.hpp"
#include "perfplan/scaling.hpp"

namespace perfplan::io {

// Timing CSV: header "n_units,wall_time_hours,censored" with censored in
// {0,1}; '#' starts a comment line. One format, no autodetection. Parse
// errors name the source and the 1-based line.

std::vector<TimingObservation> read_timings_csv(std::istream& in,
                                                std::string_view source_name = "<input>");
std::vector<TimingObservation> read_timings_csv_file(const std::filesystem::path& path);
void write_timings_csv(std::ostream& out, std::span<const TimingObservation> observations);

/// Curve CSV: header "n,speedup,predicted_time_hours"; the time column stays
/// empty when the parameters carried no baseline time.
void write_curve_csv(std::ostream& out, std::span<const CurvePoint<double>> points);

}  // namespace perfplan::io
