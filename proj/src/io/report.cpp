#include "perfplan/io/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "perfplan/errors.hpp"
#include "perfplan/io/units.hpp"

namespace perfplan::io {

namespace {

std::string value_text(const ReportValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "yes" : "no";
        } else if constexpr (std::is_same_v<T, double>) {
          char buffer[64];
          std::snprintf(buffer, sizeof buffer, "%.6g", v);
          return buffer;
        } else {
          return std::to_string(v);
        }
      },
      value);
}

nlohmann::json value_json(const ReportValue& value) {
  return std::visit([](const auto& v) { return nlohmann::json(v); }, value);
}

}  // namespace

void ReportSection::add(std::string key, ReportValue value, std::string unit) {
  rows.push_back({std::move(key), std::move(value), std::move(unit)});
}

ReportSection& ReportDocument::add_section(std::string section_title) {
  sections.push_back({std::move(section_title), {}});
  return sections.back();
}

void ReportDocument::render_text(std::ostream& out) const {
  if (!title.empty()) {
    out << title << '\n' << std::string(title.size(), '=') << '\n';
  }
  for (const auto& section : sections) {
    out << '\n' << section.title << '\n';
    std::size_t width = 0;
    for (const auto& row : section.rows) width = std::max(width, row.key.size());
    for (const auto& row : section.rows) {
      out << "  " << row.key << std::string(width - row.key.size() + 2, ' ')
          << value_text(row.value);
      if (!row.unit.empty()) out << ' ' << row.unit;
      out << '\n';
    }
  }
  if (!notes.empty()) {
    out << "\nnotes\n";
    for (const auto& note : notes) out << "  - " << note << '\n';
  }
}

void ReportDocument::render_csv(std::ostream& out) const {
  out << "section,key,value,unit\n";
  for (const auto& section : sections) {
    for (const auto& row : section.rows) {
      std::string value = std::holds_alternative<double>(row.value)
                              ? format_double(std::get<double>(row.value))
                              : value_text(row.value);
      out << section.title << ',' << row.key << ',' << value << ',' << row.unit << '\n';
    }
  }
}

nlohmann::json ReportDocument::to_json() const {
  nlohmann::json doc;
  doc["title"] = title;
  doc["sections"] = nlohmann::json::array();
  for (const auto& section : sections) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : section.rows) {
      nlohmann::json entry;
      entry["key"] = row.key;
      entry["value"] = value_json(row.value);
      if (!row.unit.empty()) entry["unit"] = row.unit;
      rows.push_back(std::move(entry));
    }
    doc["sections"].push_back({{"title", section.title}, {"rows", std::move(rows)}});
  }
  if (!notes.empty()) doc["notes"] = notes;
  return doc;
}

ScalingParams<double> params_from_fit_json(const nlohmann::json& doc,
                                           std::string_view source_name) {
  const auto fail = [&](const std::string& what) -> void {
    throw ParseError(std::string(source_name) + ": " + what);
  };

  if (!doc.is_object() || !doc.contains("sections") || !doc.at("sections").is_array()) {
    fail("not a fit report (no sections)");
  }
  const nlohmann::json* parameters = nullptr;
  for (const auto& section : doc.at("sections")) {
    if (section.value("title", "") == "parameters") {
      parameters = &section;
      break;
    }
  }
  if (parameters == nullptr) fail("fit report has no 'parameters' section");

  ScalingParams<double> params;
  bool have_s = false;
  bool have_c = false;
  bool have_nc = false;
  for (const auto& row : parameters->at("rows")) {
    const std::string key = row.value("key", "");
    const auto& value = row.at("value");
    if (key == "serial_fraction") {
      params.serial_fraction = value.get<double>();
      have_s = true;
    } else if (key == "comm_idle_fraction") {
      params.comm_idle_fraction = value.get<double>();
      have_c = true;
    } else if (key == "cores_per_node") {
      params.cores_per_node = value.get<std::int64_t>();
      have_nc = true;
    } else if (key == "baseline_time_hours") {
      params.baseline_time_hours = value.get<double>();
    }
  }
  if (!have_s || !have_c || !have_nc) {
    fail("fit report parameters are incomplete");
  }
  try {
    params.validate();
  } catch (const std::domain_error& e) {
    fail(e.what());
  }
  return params;
}

}  // namespace perfplan::io
