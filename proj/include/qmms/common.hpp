#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmms {

/// Deterministic RNG used everywhere randomness is needed; seeded explicitly.
using Rng = std::mt19937_64;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Error raised when input data fails structural validation.
class ValidationError : public std::runtime_error {
public:
  enum class Kind {
    BadShape,
    NonfiniteEntry,
    NonzeroDiagonal,
    ZeroOffDiagonal,
    NegativeDistance,
    NonpositiveWeight,
    EmptySet,
    BadIndex,
    InvalidParams,
    BadExponents,
    MissingGradient,
    InfeasibleInput,
    InfeasibleGradient,
    TouchingSets,
    NoSeparatedPair,
    TailEmpty,
    EmptyTail,
    SolverDiverged,
  };

  ValidationError(Kind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

[[noreturn]] inline void fail(ValidationError::Kind kind, const std::string& message) {
  throw ValidationError(kind, message);
}

/// x^e for x >= 0 with the conventions 0^0 = 1, 0^e = 0 (e > 0).
inline double pow_nn(double x, double e) {
  if (x == 0.0) return e == 0.0 ? 1.0 : 0.0;
  return std::pow(x, e);
}

/// log(sum_i exp(a_i)) computed stably; empty input yields -inf.
inline double log_sum_exp(const std::vector<double>& a) {
  double m = -kInf;
  for (double v : a) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : a) s += std::exp(v - m);
  return m + std::log(s);
}

/// Dyadic level of a positive distance t: the unique k with 2^{-k-1} <= t < 2^{-k}.
/// Computed in floating point and then verified/adjusted against exact powers of two.
inline int dyadic_level(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) fail(ValidationError::Kind::BadShape, "dyadic_level: t must be positive and finite");
  int k = static_cast<int>(std::ceil(-std::log2(t))) - 1;
  // Guard against rounding at exact powers of two: enforce 2^{-k-1} <= t < 2^{-k}.
  while (t >= std::ldexp(1.0, -k)) --k;
  while (t < std::ldexp(1.0, -k - 1)) ++k;
  return k;
}

/// l^p "norm" of a vector of nonnegative values with exponent p in (0, inf];
/// p = inf gives the max.  Values are combined as (sum v_i^p)^{1/p}.
inline double lq_combine(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  if (q == kInf) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
  }
  if (!(q > 0.0)) fail(ValidationError::Kind::BadExponents, "lq_combine: q must be positive");
  // Scale by the max to avoid overflow/underflow for extreme q.
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += pow_nn(x / m, q);
  return m * std::pow(s, 1.0 / q);
}

/// Relative-and-absolute closeness test used in invariants: |a-b| <= atol + rtol*max(|a|,|b|).
inline bool close(double a, double b, double rtol, double atol) {
  return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

}  // namespace qmms
