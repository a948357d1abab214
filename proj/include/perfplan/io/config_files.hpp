#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

#include "perfplan/capacity.hpp"
#include "perfplan/synthetic.hpp"

namespace perfplan::io {

// Cluster spec file: one flat JSON object. Keys: cores, clock_ghz,
// flops_per_cycle, ram_gib (or ram_gb for decimal gigabytes; exactly one of
// the two) and optionally ranks_per_node. Unknown keys are errors, not
// warnings: capacity math must not run on typo'd specs.
ClusterNodeSpec read_cluster_spec(const nlohmann::json& doc,
                                  std::string_view source_name = "<input>");
ClusterNodeSpec read_cluster_spec_file(const std::filesystem::path& path);

// Simulation config file: JSON object with params {serial_fraction,
// comm_idle_fraction, cores_per_node, baseline_time_hours}, node_counts,
// and optionally jitter_fraction, pathological_nodes
// [{n_units, slowdown_multiplier}], seed, censor_cutoff_hours. Fraction
// fields accept numbers or "x%" strings. Unknown keys are errors.
SimulationConfig read_simulation_config(const nlohmann::json& doc,
                                        std::string_view source_name = "<input>");
SimulationConfig read_simulation_config_file(const std::filesystem::path& path);

}  // namespace perfplan::io
