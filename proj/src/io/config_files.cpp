#include "perfplan/io/config_files.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>

#include "perfplan/errors.hpp"
#include "perfplan/io/units.hpp"

namespace perfplan::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::string_view source, const std::string& what) {
  throw ParseError(std::string(source) + ": " + what);
}

json load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return doc;
}

void require_object(const json& doc, std::string_view source) {
  if (!doc.is_object()) fail(source, "expected a JSON object");
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& known,
                         std::string_view source) {
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) fail(source, "unknown key '" + key + "'");
  }
}

double get_positive_number(const json& doc, const std::string& key, std::string_view source) {
  const auto& value = doc.at(key);
  if (!value.is_number()) fail(source, "'" + key + "' must be a number");
  const double number = value.get<double>();
  if (!(number > 0) || !std::isfinite(number)) fail(source, "'" + key + "' must be > 0");
  return number;
}

std::int64_t get_positive_integer(const json& doc, const std::string& key,
                                  std::string_view source) {
  const auto& value = doc.at(key);
  if (!value.is_number_integer() || value.get<std::int64_t>() < 1) {
    fail(source, "'" + key + "' must be a positive integer");
  }
  return value.get<std::int64_t>();
}

// Fraction fields accept plain numbers or percent strings ("1%" -> 0.01).
double get_fraction(const json& value, const std::string& key, std::string_view source) {
  if (value.is_string()) {
    try {
      return parse_fraction(value.get<std::string>());
    } catch (const ParseError& e) {
      fail(source, "'" + key + "': " + e.what());
    }
  }
  if (!value.is_number()) fail(source, "'" + key + "' must be a number or percent string");
  return value.get<double>();
}

}  // namespace

ClusterNodeSpec read_cluster_spec(const json& doc, std::string_view source) {
  require_object(doc, source);
  reject_unknown_keys(
      doc, {"cores", "clock_ghz", "flops_per_cycle", "ram_gib", "ram_gb", "ranks_per_node"},
      source);
  for (const char* key : {"cores", "clock_ghz", "flops_per_cycle"}) {
    if (!doc.contains(key)) fail(source, std::string("missing key '") + key + "'");
  }
  if (doc.contains("ram_gib") == doc.contains("ram_gb")) {
    fail(source, "exactly one of 'ram_gib' (binary) or 'ram_gb' (decimal) is required");
  }

  ClusterNodeSpec spec;
  spec.cores = get_positive_integer(doc, "cores", source);
  spec.clock_hz = get_positive_number(doc, "clock_ghz", source) * 1e9;
  spec.flops_per_cycle = get_positive_integer(doc, "flops_per_cycle", source);
  if (doc.contains("ram_gib")) {
    spec.ram_bytes = static_cast<std::uint64_t>(
        std::llround(get_positive_number(doc, "ram_gib", source) * 1073741824.0));
  } else {
    spec.ram_bytes = static_cast<std::uint64_t>(
        std::llround(get_positive_number(doc, "ram_gb", source) * 1e9));
  }
  if (doc.contains("ranks_per_node")) {
    spec.ranks_per_node = get_positive_integer(doc, "ranks_per_node", source);
  }
  spec.validate();
  return spec;
}

ClusterNodeSpec read_cluster_spec_file(const std::filesystem::path& path) {
  return read_cluster_spec(load_file(path), path.string());
}

SimulationConfig read_simulation_config(const json& doc, std::string_view source) {
  require_object(doc, source);
  reject_unknown_keys(doc,
                      {"params", "node_counts", "jitter_fraction", "pathological_nodes",
                       "seed", "censor_cutoff_hours"},
                      source);
  if (!doc.contains("params")) fail(source, "missing key 'params'");
  if (!doc.contains("node_counts")) fail(source, "missing key 'node_counts'");

  const json& params = doc.at("params");
  require_object(params, source);
  reject_unknown_keys(
      params,
      {"serial_fraction", "comm_idle_fraction", "cores_per_node", "baseline_time_hours"},
      source);
  for (const char* key :
       {"serial_fraction", "comm_idle_fraction", "cores_per_node", "baseline_time_hours"}) {
    if (!params.contains(key)) fail(source, std::string("params: missing key '") + key + "'");
  }

  SimulationConfig config;
  config.params.serial_fraction =
      get_fraction(params.at("serial_fraction"), "serial_fraction", source);
  config.params.comm_idle_fraction =
      get_fraction(params.at("comm_idle_fraction"), "comm_idle_fraction", source);
  config.params.cores_per_node = get_positive_integer(params, "cores_per_node", source);
  config.params.baseline_time_hours = get_positive_number(params, "baseline_time_hours", source);

  const json& counts = doc.at("node_counts");
  if (!counts.is_array() || counts.empty()) {
    fail(source, "'node_counts' must be a nonempty array");
  }
  for (const auto& n : counts) {
    if (!n.is_number_integer() || n.get<std::int64_t>() < 1) {
      fail(source, "'node_counts' entries must be positive integers");
    }
    config.node_counts.push_back(n.get<std::int64_t>());
  }

  if (doc.contains("jitter_fraction")) {
    config.jitter_fraction = get_fraction(doc.at("jitter_fraction"), "jitter_fraction", source);
  }
  if (doc.contains("pathological_nodes")) {
    const json& pathologies = doc.at("pathological_nodes");
    if (!pathologies.is_array()) fail(source, "'pathological_nodes' must be an array");
    for (const auto& entry : pathologies) {
      require_object(entry, source);
      reject_unknown_keys(entry, {"n_units", "slowdown_multiplier"}, source);
      PathologicalNode node;
      node.n_units = get_positive_integer(entry, "n_units", source);
      node.slowdown_multiplier = get_positive_number(entry, "slowdown_multiplier", source);
      config.pathological_nodes.push_back(node);
    }
  }
  if (doc.contains("seed")) {
    const auto& seed = doc.at("seed");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
      fail(source, "'seed' must be an unsigned integer");
    }
    config.seed = seed.get<std::uint64_t>();
  }
  if (doc.contains("censor_cutoff_hours") && !doc.at("censor_cutoff_hours").is_null()) {
    config.censor_cutoff_hours = get_positive_number(doc, "censor_cutoff_hours", source);
  }

  try {
    config.validate();
  } catch (const std::domain_error& e) {
    fail(source, e.what());
  }
  return config;
}

SimulationConfig read_simulation_config_file(const std::filesystem::path& path) {
  return read_simulation_config(load_file(path), path.string());
}

}  // namespace perfplan::io
