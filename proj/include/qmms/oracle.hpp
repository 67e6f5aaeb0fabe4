#pragma once

#include <cstddef>
#include <vector>

#include "qmms/norms.hpp"
#include "qmms/space.hpp"

namespace qmms {

/// Brute-force reference values for the minimal-gradient programs on very
/// small spaces.  The methods here are deliberately different from the
/// iterative solver: linear programs are resolved by vertex enumeration and
/// smooth strictly convex programs by exhaustive active-set enumeration, so
/// the two implementations share no code path that could fail in unison.
///
/// Size limits are strict (enumeration is exponential); exceeding them raises
/// ValidationError with Kind::InvalidParams.

struct OracleResult {
  double seminorm = 0.0;           ///< p-th root of the minimal objective
  double objective = 0.0;          ///< sum_i w_i g_i^p at the optimum
  std::vector<double> gradient;    ///< an optimal (or clamped near-optimal) g
};

/// Minimal single-gradient seminorm by enumeration.
OracleResult oracle_sobolev(const FiniteQMMSpace& space, const std::vector<double>& u,
                            double alpha, double p);

/// Level-binned variant: independent per-level enumerations combined in l^q.
double oracle_besov_seminorm(const FiniteQMMSpace& space, const std::vector<double>& u,
                             double alpha, double p, double q);

/// Enumeration core on an explicit constraint list (used by both entry points
/// and directly by tests).
OracleResult oracle_core(std::size_t n, const std::vector<double>& w, double p,
                         const std::vector<PairConstraint>& pairs);

/// Closed form for the one-constraint problem
///   minimize w1 g1^p + w2 g2^p  subject to  g1 + g2 >= c, g >= 0.
/// Returns the p-th root of the minimum.
double two_point_seminorm(double c, double w1, double w2, double p);

}  // namespace qmms
