#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "perfplan/scaling.hpp"

namespace perfplan::io {

using ReportValue = std::variant<std::string, double, std::int64_t, std::uint64_t, bool>;

struct ReportRow {
  std::string key;
  ReportValue value;
  std::string unit{};
};

struct ReportSection {
  std::string title;
  std::vector<ReportRow> rows;

  void add(std::string key, ReportValue value, std::string unit = {});
};

/// Titled key-value sections with one human (text), one machine (JSON) and
/// one csv rendering. Every value placed here comes straight from a core
/// operation's output.
struct ReportDocument {
  std::string title;
  std::vector<ReportSection> sections;
  std::vector<std::string> notes;

  ReportSection& add_section(std::string section_title);

  void render_text(std::ostream& out) const;
  void render_csv(std::ostream& out) const;
  nlohmann::json to_json() const;
};

/// Rebuilds ScalingParams from a fit report's JSON rendering (its
/// "parameters" section) — the loader behind `curve --from-fit`.
ScalingParams<double> params_from_fit_json(const nlohmann::json& doc,
                                           std::string_view source_name = "<input>");

}  // namespace perfplan::io
