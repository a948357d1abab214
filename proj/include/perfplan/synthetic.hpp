#pragma once

// Seeded generator of model-consistent timing data, used for fit validation
// and demos. Equal configs (same seed included) produce byte-identical output
// on every platform; see SplitMix64 below for the portability contract.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "perfplan/fitting.hpp"
#include "perfplan/scaling.hpp"

namespace perfplan {

/// SplitMix64 (Steele, Lea & Flood's 64-bit mixer): state advances by the
/// golden-ratio constant and each output is three xor-shift-multiply rounds.
/// Chosen over std::mt19937_64 + distributions because the whole sequence,
/// including the double conversion, is pinned down by a few lines that any
/// language can reproduce bit for bit.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1): the top 53 bits of next(), scaled by 2^-53.
  constexpr double next_unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [-amplitude, +amplitude].
  constexpr double next_symmetric(double amplitude) noexcept {
    return (2.0 * next_unit() - 1.0) * amplitude;
  }

 private:
  std::uint64_t state_;
};

/// A node count to slow down artificially, imitating the oddball counts on
/// which real runs misbehave. Pathologies are injected, never inferred: this
/// module makes test fixtures, not claims about causes.
struct PathologicalNode {
  std::int64_t n_units{1};
  double slowdown_multiplier{1.0};
};

struct SimulationConfig {
  ScalingParams<double> params;  // baseline_time_hours required
  std::vector<std::int64_t> node_counts;
  double jitter_fraction{0.10};
  std::vector<PathologicalNode> pathological_nodes;
  std::uint64_t seed{0};
  std::optional<double> censor_cutoff_hours{};  // unset: runs are never censored

  void validate() const {
    params.validate();
    if (!params.baseline_time_hours) {
      throw std::domain_error("simulation requires baseline_time_hours");
    }
    if (node_counts.empty()) throw std::domain_error("node_counts must be nonempty");
    for (std::int64_t n : node_counts) detail::validate_units(n);
    if (!(jitter_fraction >= 0 && jitter_fraction < 1)) {
      throw std::domain_error("jitter_fraction must lie in [0, 1)");
    }
    for (const auto& p : pathological_nodes) {
      detail::validate_units(p.n_units);
      if (!(p.slowdown_multiplier >= 1)) {
        throw std::domain_error("slowdown_multiplier must be >= 1");
      }
    }
    if (censor_cutoff_hours && !(*censor_cutoff_hours > 0)) {
      throw std::domain_error("censor_cutoff_hours must be > 0");
    }
  }
};

/// For each node count, in input order:
///   T = T1 * (S + (1-S)/N + C*N/Nc) * (1 + u),  u uniform in [-jitter, +jitter],
/// then multiplied by the slowdown factor when N is pathological. A run past
/// the censor cutoff records the cutoff as its (lower-bound) wall time and is
/// marked censored. Exactly one jitter value is drawn per node count, even at
/// jitter 0, so the stream stays aligned across configs.
inline std::vector<TimingObservation> generate_timings(const SimulationConfig& config) {
  config.validate();
  SplitMix64 rng(config.seed);

  std::vector<TimingObservation> observations;
  observations.reserve(config.node_counts.size());
  for (std::int64_t n : config.node_counts) {
    const double jitter = rng.next_symmetric(config.jitter_fraction);
    double time = *config.params.baseline_time_hours *
                  extended_denominator(config.params, static_cast<double>(n)) *
                  (1.0 + jitter);
    for (const auto& p : config.pathological_nodes) {
      if (p.n_units == n) time *= p.slowdown_multiplier;
    }

    TimingObservation obs;
    obs.n_units = n;
    obs.censored = config.censor_cutoff_hours && time > *config.censor_cutoff_hours;
    obs.wall_time_hours = obs.censored ? *config.censor_cutoff_hours : time;
    observations.push_back(obs);
  }
  return observations;
}

}  // namespace perfplan
