#pragma once

// Closed-form strong-scaling speedup models.
//
// Classical Amdahl:   speedup(N) = 1 / (S + (1 - S)/N)
// Extended model:     speedup(N) = 1 / (S + (1 - S)/N + C * N / Nc)
//
// S is the serial fraction of the code, C the communication-idle fraction and
// Nc the number of cores per node. The linear C*N/Nc term charges each added
// unit a communication cost, so the extended curve peaks at a finite N and
// then falls. Both fractions are stored in [0,1] scale ("1%" parsing is an
// I/O concern, see perfplan::io::parse_fraction).

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace perfplan {

namespace detail {

template <typename Scalar>
void validate_fraction(Scalar value, const char* name) {
  // The negated comparison also rejects NaN.
  if (!(value >= Scalar{0} && value <= Scalar{1})) {
    throw std::domain_error(std::string(name) + " must lie in [0, 1]");
  }
}

inline void validate_units(std::int64_t n_units) {
  if (n_units < 1) throw std::domain_error("n_units must be >= 1");
}

}  // namespace detail

/// Parameters of the extended speedup model. `baseline_time_hours` (T1, the
/// single-unit wall time) is only needed for absolute-time prediction.
template <typename Scalar = double>
struct ScalingParams {
  Scalar serial_fraction{0};
  Scalar comm_idle_fraction{0};
  std::int64_t cores_per_node{1};
  std::optional<Scalar> baseline_time_hours{};

  void validate() const {
    detail::validate_fraction(serial_fraction, "serial_fraction");
    if (!(comm_idle_fraction >= Scalar{0}) ||
        !std::isfinite(static_cast<double>(comm_idle_fraction))) {
      throw std::domain_error("comm_idle_fraction must be finite and >= 0");
    }
    if (cores_per_node < 1) throw std::domain_error("cores_per_node must be >= 1");
    if (baseline_time_hours &&
        !(*baseline_time_hours > Scalar{0} &&
          std::isfinite(static_cast<double>(*baseline_time_hours)))) {
      throw std::domain_error("baseline_time_hours must be finite and > 0");
    }
  }
};

enum class SpeedupModel { kClassical, kExtended };

// Denominators of the speedup expressions, over real-valued unit counts.
// speedup(N) = 1 / denominator(N) and predicted time = T1 * denominator(N).

template <typename Scalar>
Scalar classical_denominator(Scalar serial_fraction, Scalar n_units) {
  return serial_fraction + (Scalar{1} - serial_fraction) / n_units;
}

template <typename Scalar>
Scalar extended_denominator(const ScalingParams<Scalar>& params, Scalar n_units) {
  return classical_denominator(params.serial_fraction, n_units) +
         params.comm_idle_fraction * n_units / Scalar(params.cores_per_node);
}

template <typename Scalar>
Scalar model_denominator(const ScalingParams<Scalar>& params, Scalar n_units,
                         SpeedupModel model) {
  return model == SpeedupModel::kClassical
             ? classical_denominator(params.serial_fraction, n_units)
             : extended_denominator(params, n_units);
}

// Expression forms over Eigen arrays of unit counts. Preconditions (every
// n >= 1, valid params) are the caller's; the result references `n_units`.

template <typename Derived>
auto classical_denominator(typename Derived::Scalar serial_fraction,
                           const Eigen::ArrayBase<Derived>& n_units) {
  using Scalar = typename Derived::Scalar;
  return serial_fraction + (Scalar{1} - serial_fraction) * n_units.inverse();
}

template <typename Derived>
auto extended_denominator(const ScalingParams<typename Derived::Scalar>& params,
                          const Eigen::ArrayBase<Derived>& n_units) {
  using Scalar = typename Derived::Scalar;
  return classical_denominator(params.serial_fraction, n_units) +
         (params.comm_idle_fraction / Scalar(params.cores_per_node)) * n_units;
}

template <typename Derived>
auto amdahl_speedup(typename Derived::Scalar serial_fraction,
                    const Eigen::ArrayBase<Derived>& n_units) {
  return classical_denominator(serial_fraction, n_units).inverse();
}

template <typename Derived>
auto extended_speedup(const ScalingParams<typename Derived::Scalar>& params,
                      const Eigen::ArrayBase<Derived>& n_units) {
  return extended_denominator(params, n_units).inverse();
}

/// Classical Amdahl speedup at an integral unit count. Lies in [1, 1/S].
template <typename Scalar = double>
Scalar amdahl_speedup(Scalar serial_fraction, std::int64_t n_units) {
  detail::validate_fraction(serial_fraction, "serial_fraction");
  detail::validate_units(n_units);
  return Scalar{1} / classical_denominator(serial_fraction, Scalar(n_units));
}

/// Extended-model speedup at an integral unit count. Evaluated as written,
/// unnormalized: for C > 0 the value at N = 1 is 1/(1 + C/Nc) < 1.
template <typename Scalar = double>
Scalar extended_speedup(const ScalingParams<Scalar>& params, std::int64_t n_units) {
  params.validate();
  detail::validate_units(n_units);
  return Scalar{1} / extended_denominator(params, Scalar(n_units));
}

/// Extended speedup rescaled by its N = 1 value, so curves start at exactly 1.
/// Intended for plotting; predicted times are unaffected by the rescale.
template <typename Scalar = double>
Scalar extended_speedup_normalized(const ScalingParams<Scalar>& params,
                                   std::int64_t n_units) {
  params.validate();
  detail::validate_units(n_units);
  return extended_denominator(params, Scalar{1}) /
         extended_denominator(params, Scalar(n_units));
}

/// Upper bound 1/S of classical speedup; +infinity when S == 0.
template <typename Scalar = double>
Scalar asymptotic_speedup(Scalar serial_fraction) {
  detail::validate_fraction(serial_fraction, "serial_fraction");
  if (serial_fraction == Scalar{0}) return std::numeric_limits<Scalar>::infinity();
  return Scalar{1} / serial_fraction;
}

/// Real-valued maximizer N* = sqrt((1 - S) * Nc / C) of the extended speedup.
/// The denominator is strictly convex in N, so the optimum is unique. Returns
/// nullopt when C == 0 (speedup is then nondecreasing, no finite optimum).
/// For the boundary case S == 1 the speedup only decreases, so the best valid
/// unit count, 1, is returned.
template <typename Scalar = double>
std::optional<Scalar> optimal_node_count(const ScalingParams<Scalar>& params) {
  params.validate();
  if (params.comm_idle_fraction == Scalar{0}) return std::nullopt;
  if (params.serial_fraction == Scalar{1}) return Scalar{1};
  using std::sqrt;
  return sqrt((Scalar{1} - params.serial_fraction) * Scalar(params.cores_per_node) /
              params.comm_idle_fraction);
}

/// One sampled point of a speedup curve. `predicted_time_hours` is present
/// exactly when the parameters carried a baseline time.
template <typename Scalar = double>
struct CurvePoint {
  std::int64_t n_units{1};
  Scalar speedup{1};
  std::optional<Scalar> predicted_time_hours{};
};

/// Samples the chosen model at each unit count, in input order.
/// `normalized` divides speedups by the model's N = 1 value (see
/// extended_speedup_normalized); predicted times stay physical.
template <typename Scalar = double>
std::vector<CurvePoint<Scalar>> sample_curve(const ScalingParams<Scalar>& params,
                                             std::span<const std::int64_t> n_values,
                                             SpeedupModel model = SpeedupModel::kExtended,
                                             bool normalized = false) {
  params.validate();
  if (n_values.empty()) throw std::domain_error("sample_curve: n_values must be nonempty");
  for (std::int64_t n : n_values) detail::validate_units(n);

  Eigen::Array<Scalar, Eigen::Dynamic, 1> n(static_cast<Eigen::Index>(n_values.size()));
  for (Eigen::Index i = 0; i < n.size(); ++i) n[i] = Scalar(n_values[static_cast<std::size_t>(i)]);

  Eigen::Array<Scalar, Eigen::Dynamic, 1> denom =
      model == SpeedupModel::kClassical
          ? classical_denominator(params.serial_fraction, n).eval()
          : extended_denominator(params, n).eval();
  const Scalar numerator =
      normalized ? model_denominator(params, Scalar{1}, model) : Scalar{1};

  std::vector<CurvePoint<Scalar>> points(n_values.size());
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    auto& p = points[i];
    p.n_units = n_values[i];
    p.speedup = numerator / denom[static_cast<Eigen::Index>(i)];
    if (params.baseline_time_hours) {
      p.predicted_time_hours = *params.baseline_time_hours * denom[static_cast<Eigen::Index>(i)];
    }
  }
  return points;
}

}  // namespace perfplan
