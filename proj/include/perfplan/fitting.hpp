#pragma once

// Estimation of ScalingParams from measured timings.
//
// The extended model is linear in a transformed basis:
//   T(N) = T1 * (S + (1-S)/N + C*N/Nc) = a + b/N + c*N
// with a = T1*S, b = T1*(1-S), c = T1*C/Nc, so the fit is a closed-form
// linear least squares rather than a nonlinear optimization.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "perfplan/errors.hpp"
#include "perfplan/scaling.hpp"

namespace perfplan {

/// One measured strong-scaling run. `censored` marks a run that was stopped
/// at a cutoff, so wall_time_hours is a lower bound rather than a measurement.
struct TimingObservation {
  std::int64_t n_units{1};
  double wall_time_hours{0};
  bool censored{false};
};

template <typename Scalar = double>
struct ResidualEntry {
  std::int64_t n_units{1};
  Scalar relative{0};  // (model - observed) / observed
};

template <typename Scalar = double>
struct FitResult {
  ScalingParams<Scalar> params;                  // baseline_time_hours is fitted
  std::vector<ResidualEntry<Scalar>> residuals;  // one per non-censored observation
  std::vector<std::int64_t> outliers;            // censored runs, at minimum
  Scalar rms_relative_error{0};
};

namespace detail {

inline void validate_observation(const TimingObservation& obs) {
  if (obs.n_units < 1) throw std::domain_error("observation n_units must be >= 1");
  if (!(obs.wall_time_hours > 0) || !std::isfinite(obs.wall_time_hours)) {
    throw std::domain_error("observation wall_time_hours must be finite and > 0");
  }
}

template <typename Scalar>
Scalar predicted_time(const ScalingParams<Scalar>& params, std::int64_t n_units) {
  return *params.baseline_time_hours * extended_denominator(params, Scalar(n_units));
}

template <typename Scalar>
Scalar median_abs(std::vector<Scalar> values) {
  const std::size_t m = values.size();
  for (auto& v : values) v = std::abs(v);
  std::sort(values.begin(), values.end());
  return m % 2 == 1 ? values[m / 2] : (values[m / 2 - 1] + values[m / 2]) / Scalar{2};
}

}  // namespace detail

/// Fits the extended model to the non-censored observations.
///
/// Rows of the least-squares system are scaled by 1/T so the minimized error
/// is relative; timings here span decades and an absolute objective would let
/// the slowest run dominate (and lets a single inflated run drag the fit).
/// The physical coefficients are nonnegative, so a < 0 or c < 0 can only come
/// from noise: the offending coefficient is pinned to 0 and the system is
/// re-solved, at most twice. Censored observations never enter the system and
/// are always reported as outliers.
///
/// Throws InsufficientDataError with fewer than 3 distinct non-censored unit
/// counts, and DegenerateFitError when clamping leaves no positive parallel
/// term (timings that do not decrease with N at all).
template <typename Scalar = double>
FitResult<Scalar> fit_extended(std::span<const TimingObservation> observations,
                               std::int64_t cores_per_node) {
  if (cores_per_node < 1) throw std::domain_error("cores_per_node must be >= 1");

  std::vector<TimingObservation> kept;
  kept.reserve(observations.size());
  std::set<std::int64_t> distinct;
  for (const auto& obs : observations) {
    detail::validate_observation(obs);
    if (obs.censored) continue;
    kept.push_back(obs);
    distinct.insert(obs.n_units);
  }
  if (distinct.size() < 3) {
    throw InsufficientDataError(
        "fit requires >= 3 distinct non-censored unit counts, got " +
        std::to_string(distinct.size()));
  }

  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto rows = static_cast<Eigen::Index>(kept.size());

  Matrix basis(rows, 3);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& obs = kept[static_cast<std::size_t>(i)];
    const Scalar weight = Scalar{1} / Scalar(obs.wall_time_hours);
    basis(i, 0) = weight;
    basis(i, 1) = weight / Scalar(obs.n_units);
    basis(i, 2) = weight * Scalar(obs.n_units);
  }
  const Vector target = Vector::Ones(rows);

  bool use_a = true;
  bool use_c = true;
  Eigen::Matrix<Scalar, 3, 1> coef = Eigen::Matrix<Scalar, 3, 1>::Zero();
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::vector<Eigen::Index> cols;
    if (use_a) cols.push_back(0);
    cols.push_back(1);
    if (use_c) cols.push_back(2);

    Matrix sub(rows, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = basis.col(cols[j]);
    const Vector solution = sub.colPivHouseholderQr().solve(target);

    coef.setZero();
    for (std::size_t j = 0; j < cols.size(); ++j) coef[cols[j]] = solution[static_cast<Eigen::Index>(j)];

    if (use_a && coef[0] < Scalar{0}) {
      use_a = false;
      continue;
    }
    if (use_c && coef[2] < Scalar{0}) {
      use_c = false;
      continue;
    }
    break;
  }

  const Scalar a = coef[0];
  const Scalar b = coef[1];
  const Scalar c = coef[2];
  if (!(b > Scalar{0})) {
    throw DegenerateFitError("degenerate fit: parallel term is not positive; "
                             "timings do not decrease with the unit count");
  }

  FitResult<Scalar> result;
  result.params.serial_fraction = a / (a + b);
  result.params.comm_idle_fraction = c * Scalar(cores_per_node) / (a + b);
  result.params.cores_per_node = cores_per_node;
  result.params.baseline_time_hours = a + b;
  result.params.validate();

  result.residuals.reserve(kept.size());
  Scalar sum_sq{0};
  for (const auto& obs : kept) {
    const Scalar model = a + b / Scalar(obs.n_units) + c * Scalar(obs.n_units);
    const Scalar rel = (model - Scalar(obs.wall_time_hours)) / Scalar(obs.wall_time_hours);
    result.residuals.push_back({obs.n_units, rel});
    sum_sq += rel * rel;
  }
  result.rms_relative_error = std::sqrt(sum_sq / Scalar(kept.size()));

  for (const auto& obs : observations) {
    if (obs.censored) result.outliers.push_back(obs.n_units);
  }
  return result;
}

/// Flags every run whose |relative residual| under the fitted model exceeds
/// threshold_k times the median absolute relative residual, plus every
/// censored run. Data-driven: no divisibility rule is assumed. Results keep
/// observation order. Residuals below 1e-12 count as zero, so exact-model
/// data flags nothing regardless of floating-point dust.
template <typename Scalar = double>
std::vector<std::int64_t> detect_outliers(std::span<const TimingObservation> observations,
                                          const FitResult<Scalar>& fitted,
                                          Scalar threshold_k = Scalar{3}) {
  if (!(threshold_k > Scalar{0})) throw std::domain_error("threshold_k must be > 0");
  fitted.params.validate();
  if (!fitted.params.baseline_time_hours) {
    throw std::domain_error("fitted params lack a baseline time");
  }

  std::vector<Scalar> abs_residuals;
  abs_residuals.reserve(observations.size());
  for (const auto& obs : observations) {
    detail::validate_observation(obs);
    if (obs.censored) continue;
    const Scalar model = detail::predicted_time(fitted.params, obs.n_units);
    abs_residuals.push_back((model - Scalar(obs.wall_time_hours)) / Scalar(obs.wall_time_hours));
  }

  std::vector<std::int64_t> flagged;
  if (abs_residuals.empty()) {
    for (const auto& obs : observations) {
      if (obs.censored) flagged.push_back(obs.n_units);
    }
    return flagged;
  }

  constexpr Scalar kNumericallyZero = Scalar(1e-12);
  const Scalar cutoff =
      std::max(threshold_k * detail::median_abs(abs_residuals), kNumericallyZero);
  std::size_t next = 0;
  for (const auto& obs : observations) {
    if (obs.censored) {
      flagged.push_back(obs.n_units);
      continue;
    }
    if (std::abs(abs_residuals[next++]) > cutoff) flagged.push_back(obs.n_units);
  }
  return flagged;
}

/// Divisibility facts for one preferred multiple. `nearest_below` is absent
/// when no positive multiple lies at or below n.
struct MultipleAdvice {
  std::int64_t multiple{1};
  bool divides{false};
  std::optional<std::int64_t> nearest_below{};
  std::int64_t nearest_above{1};
};

struct NodeCountAdvice {
  std::int64_t n_units{1};
  bool power_of_two{false};
  std::vector<MultipleAdvice> multiples;
};

/// Reports whether n_units aligns with the preferred multiples and with
/// powers of two. Purely heuristic scheduling hygiene: misaligned counts
/// correlate with pathological timings on some codes, but no causal rule is
/// claimed and nothing here feeds the fit.
inline NodeCountAdvice advise_node_count(std::int64_t n_units,
                                         std::span<const std::int64_t> preferred_multiples) {
  detail::validate_units(n_units);
  if (preferred_multiples.empty()) {
    throw std::domain_error("preferred_multiples must be nonempty");
  }

  NodeCountAdvice advice;
  advice.n_units = n_units;
  advice.power_of_two = (n_units & (n_units - 1)) == 0;
  for (std::int64_t m : preferred_multiples) {
    if (m < 1) throw std::domain_error("preferred multiples must be >= 1");
    MultipleAdvice entry;
    entry.multiple = m;
    entry.divides = n_units % m == 0;
    const std::int64_t below = (n_units / m) * m;
    if (below > 0) entry.nearest_below = below;
    entry.nearest_above = ((n_units + m - 1) / m) * m;
    advice.multiples.push_back(entry);
  }
  return advice;
}

inline NodeCountAdvice advise_node_count(std::int64_t n_units) {
  static constexpr std::int64_t kDefaults[] = {8, 16};
  return advise_node_count(n_units, kDefaults);
}

}  // namespace perfplan
