#pragma once

// Hardware capacity arithmetic: peak flops, benchmark efficiency, and how
// many fully-described qubits a cluster's RAM can hold. A state vector of n
// qubits stores 2^n amplitudes, so memory doubles per added qubit; all byte
// arithmetic runs in 128-bit integers and is exact.

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "perfplan/errors.hpp"

namespace perfplan {

/// Per-node hardware description. RAM is in bytes; GiB/GB parsing is an I/O
/// concern. `ranks_per_node` is the number of parallel processes launched per
/// node and defaults to the physical core count.
struct ClusterNodeSpec {
  std::int64_t cores{1};
  double clock_hz{0};
  std::int64_t flops_per_cycle{1};
  std::uint64_t ram_bytes{0};
  std::optional<std::int64_t> ranks_per_node{};

  std::int64_t effective_ranks_per_node() const { return ranks_per_node.value_or(cores); }

  void validate() const {
    if (cores < 1) throw std::domain_error("cores must be >= 1");
    if (!(clock_hz > 0) || !std::isfinite(clock_hz)) {
      throw std::domain_error("clock_hz must be finite and > 0");
    }
    if (flops_per_cycle < 1) throw std::domain_error("flops_per_cycle must be >= 1");
    if (ram_bytes == 0) throw std::domain_error("ram_bytes must be > 0");
    if (ranks_per_node && *ranks_per_node < 1) {
      throw std::domain_error("ranks_per_node must be >= 1");
    }
  }
};

/// The node this toolkit's defaults were calibrated against: 32 physical
/// cores at 2.10 GHz with two 8-wide double-precision FMA units per core
/// (32 flops/cycle) and 376 GiB RAM.
inline ClusterNodeSpec reference_node_spec() {
  ClusterNodeSpec spec;
  spec.cores = 32;
  spec.clock_hz = 2.1e9;
  spec.flops_per_cycle = 32;
  spec.ram_bytes = 376ULL << 30;
  return spec;
}

/// State-vector memory model. 16 bytes per amplitude is a complex double.
/// `buffer_factor` defaults to 2 for distributed runs, where each rank holds
/// a receive buffer the size of its local partition, and to 1 on one node.
struct MemoryModel {
  std::uint64_t bytes_per_amplitude{16};
  std::optional<double> buffer_factor{};
  double usable_ram_fraction{1.0};

  double buffer_for(std::int64_t nodes) const {
    return buffer_factor ? *buffer_factor : (nodes > 1 ? 2.0 : 1.0);
  }

  void validate() const {
    if (bytes_per_amplitude == 0) throw std::domain_error("bytes_per_amplitude must be > 0");
    if (buffer_factor && !(*buffer_factor > 0 && std::isfinite(*buffer_factor))) {
      throw std::domain_error("buffer_factor must be finite and > 0");
    }
    if (!(usable_ram_fraction > 0 && usable_ram_fraction <= 1)) {
      throw std::domain_error("usable_ram_fraction must lie in (0, 1]");
    }
  }
};

struct QubitPlan {
  int max_qubits{0};
  int min_qubits{0};
  std::uint64_t bytes_required{0};  // for max_qubits, buffer included
  std::uint64_t bytes_available{0};
};

/// 2^59 amplitudes at 16 bytes with buffer factor 2 is 2^64 bytes; anything
/// beyond needs more than 64-bit byte totals and is rejected.
inline constexpr int kMaxPlannableQubits = 59;

namespace detail {

using Bytes128 = unsigned __int128;

inline Bytes128 state_vector_bytes(int n_qubits, std::uint64_t bytes_per_amplitude) {
  return Bytes128(bytes_per_amplitude) << n_qubits;
}

inline Bytes128 required_bytes(int n_qubits, double buffer_factor,
                               std::uint64_t bytes_per_amplitude) {
  const Bytes128 amplitudes = state_vector_bytes(n_qubits, bytes_per_amplitude);
  double integral = 0;
  if (std::modf(buffer_factor, &integral) == 0.0 && buffer_factor < 1e18) {
    return amplitudes * Bytes128(static_cast<std::uint64_t>(buffer_factor));
  }
  // Fractional factors round the requirement up; exact to long-double precision.
  return Bytes128(std::ceil(static_cast<long double>(amplitudes) * buffer_factor));
}

inline Bytes128 available_bytes(std::int64_t nodes, const ClusterNodeSpec& spec,
                                double usable_ram_fraction) {
  Bytes128 total = Bytes128(static_cast<std::uint64_t>(nodes)) * spec.ram_bytes;
  if (usable_ram_fraction != 1.0) {
    total = Bytes128(std::floor(static_cast<long double>(total) * usable_ram_fraction));
  }
  return total;
}

inline int min_register_qubits(std::int64_t nodes, const ClusterNodeSpec& spec) {
  // Smallest q with 2^q >= total ranks: one amplitude per rank at minimum.
  const Bytes128 ranks =
      Bytes128(static_cast<std::uint64_t>(nodes)) *
      Bytes128(static_cast<std::uint64_t>(spec.effective_ranks_per_node()));
  int q = 0;
  while ((Bytes128(1) << q) < ranks) ++q;
  return q;
}

inline std::string bytes128_to_string(Bytes128 value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  return {digits.rbegin(), digits.rend()};
}

}  // namespace detail

/// Largest register that fits in the cluster's usable RAM, together with the
/// smallest register the rank count permits. Memory comparisons are exact
/// integer arithmetic; results are capped at kMaxPlannableQubits.
/// Throws InfeasiblePlanError when even the minimum register does not fit.
inline QubitPlan max_qubits(std::int64_t nodes, const ClusterNodeSpec& spec,
                            const MemoryModel& memory = {}) {
  spec.validate();
  memory.validate();
  if (nodes < 1) throw std::domain_error("nodes must be >= 1");

  const double buffer = memory.buffer_for(nodes);
  const auto available = detail::available_bytes(nodes, spec, memory.usable_ram_fraction);
  if (available > detail::Bytes128(std::numeric_limits<std::uint64_t>::max())) {
    throw std::domain_error("cluster RAM exceeds 2^64 bytes; not supported");
  }

  const int min_q = detail::min_register_qubits(nodes, spec);
  if (min_q > kMaxPlannableQubits ||
      detail::required_bytes(min_q, buffer, memory.bytes_per_amplitude) > available) {
    throw InfeasiblePlanError(
        "infeasible: the minimum register of " + std::to_string(min_q) + " qubits needs " +
        detail::bytes128_to_string(
            detail::required_bytes(min_q, buffer, memory.bytes_per_amplitude)) +
        " bytes but only " + detail::bytes128_to_string(available) + " are available");
  }

  int best = min_q;
  while (best < kMaxPlannableQubits &&
         detail::required_bytes(best + 1, buffer, memory.bytes_per_amplitude) <= available) {
    ++best;
  }

  QubitPlan plan;
  plan.max_qubits = best;
  plan.min_qubits = min_q;
  plan.bytes_required = static_cast<std::uint64_t>(
      detail::required_bytes(best, buffer, memory.bytes_per_amplitude));
  plan.bytes_available = static_cast<std::uint64_t>(available);
  return plan;
}

/// Smallest node count whose RAM holds an n_qubits register. With
/// round_to_power_of_two (the default, matching how distributed state-vector
/// partitions split), the raw minimum is rounded up to the next power of two.
inline std::int64_t nodes_for_qubits(int n_qubits, const ClusterNodeSpec& spec,
                                     const MemoryModel& memory = {},
                                     bool round_to_power_of_two = true) {
  spec.validate();
  memory.validate();
  if (n_qubits < 1) throw std::domain_error("n_qubits must be >= 1");
  if (n_qubits > kMaxPlannableQubits) {
    throw InfeasiblePlanError("qubit counts beyond " + std::to_string(kMaxPlannableQubits) +
                              " overflow 64-bit byte totals; rejected");
  }

  if (detail::required_bytes(n_qubits, memory.buffer_for(1), memory.bytes_per_amplitude) <=
      detail::available_bytes(1, spec, memory.usable_ram_fraction)) {
    return 1;
  }

  const auto needed =
      detail::required_bytes(n_qubits, memory.buffer_for(2), memory.bytes_per_amplitude);
  const long double per_node =
      static_cast<long double>(spec.ram_bytes) * memory.usable_ram_fraction;
  auto nodes = static_cast<std::int64_t>(
      std::ceil(static_cast<long double>(needed) / per_node));
  if (nodes < 2) nodes = 2;
  while (detail::available_bytes(nodes, spec, memory.usable_ram_fraction) < needed) ++nodes;
  while (nodes > 2 &&
         detail::available_bytes(nodes - 1, spec, memory.usable_ram_fraction) >= needed) {
    --nodes;
  }

  if (round_to_power_of_two) {
    std::uint64_t rounded = 1;
    while (rounded < static_cast<std::uint64_t>(nodes)) rounded <<= 1;
    nodes = static_cast<std::int64_t>(rounded);
  }
  return nodes;
}

/// Theoretical peak rate: nodes * cores * clock * flops/cycle.
inline double peak_flops(const ClusterNodeSpec& spec, std::int64_t nodes) {
  spec.validate();
  if (nodes < 1) throw std::domain_error("nodes must be >= 1");
  return static_cast<double>(nodes) * static_cast<double>(spec.cores) * spec.clock_hz *
         static_cast<double>(spec.flops_per_cycle);
}

/// measured/peak. A measurement above the theoretical peak means the peak
/// spec is wrong; it is flagged, not rejected.
struct Efficiency {
  double value{0};
  bool exceeds_peak{false};
};

inline Efficiency efficiency(double measured_flops, double peak) {
  if (!(measured_flops > 0) || !(peak > 0)) {
    throw std::domain_error("efficiency requires positive measured and peak flops");
  }
  const double value = measured_flops / peak;
  return {value, value > 1.0};
}

/// Best/mean/spread of repeated benchmark runs. relative_spread is
/// (max - min)/max, comparable against the expected run-to-run variation band.
struct RunStatistics {
  double best{0};
  double mean{0};
  double relative_spread{0};
};

inline RunStatistics run_statistics(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("run_statistics: empty sample list");
  Eigen::Map<const Eigen::ArrayXd> values(samples.data(),
                                          static_cast<Eigen::Index>(samples.size()));
  if (!(values > 0.0).all()) throw std::domain_error("samples must be positive");
  const double best = values.maxCoeff();
  return {best, values.mean(), (best - values.minCoeff()) / best};
}

}  // namespace perfplan
