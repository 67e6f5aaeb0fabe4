#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qmms/space.hpp"

namespace qmms {

/// A separated set / net produced by one of the constructions below.
struct NetResult {
  double epsilon = 0.0;
  std::vector<std::size_t> centers;
  std::string kind;                  // "maximal_separated" or "net"
  double cover_radius_factor = 1.0;  // every point lies within factor*epsilon of a center
};

/// Greedy scan in index order: a point is kept when both oriented distances to
/// every kept center are >= epsilon.  The result is maximal, and every point
/// lies within cover_radius_factor * epsilon of some center (factor = symmetry
/// constant of the space).
NetResult greedy_separated(const FiniteQMMSpace& space, double epsilon);

/// Farthest-first traversal.  order[m] is the m-th chosen center (the first is
/// point 0); radii[m] is the covering radius achieved by the first m centers,
/// i.e. max over x of min over chosen c of d(c, x); radii[0] corresponds to one
/// center.  Radii are nonincreasing, and prefixes are directed-separated sets.
struct FarthestFirst {
  std::vector<std::size_t> order;
  std::vector<double> radii;  // radii[m-1] = covering radius of the first m centers
};

FarthestFirst farthest_first(const FiniteQMMSpace& space);

/// Net sizes over an epsilon grid, from a single farthest-first traversal;
/// sizes are nonincreasing as epsilon grows.
struct CoveringProfile {
  std::vector<double> epsilons;      // sorted ascending
  std::vector<std::size_t> sizes;    // smallest prefix that covers strictly below epsilon
  FarthestFirst traversal;
};

CoveringProfile covering_profile(const FiniteQMMSpace& space, std::vector<double> epsilons);

/// h(r) = inf over centers of mu(B(x, r)).
double h_value(const FiniteQMMSpace& space, double r);
std::vector<double> h_profile(const FiniteQMMSpace& space, const std::vector<double>& radii);

/// Cardinality bound for any eps-separated set: mu(X) / h(eps / (C * C_tilde)).
double separated_count_bound(const FiniteQMMSpace& space, double epsilon);

/// Exact smallest constant with mu(B(x, c*delta)) <= C * mu(B(x, delta)) for
/// every center, at one scale delta.
double doubling_constant(const FiniteQMMSpace& space, double c, double delta);

/// Exact sup over all delta > 0 of doubling_constant(space, c, delta).  The
/// supremum is attained on a finite candidate set because ball masses are
/// piecewise constant in the radius (constant on left-open right-closed
/// intervals between consecutive distance values).
double doubling_sup(const FiniteQMMSpace& space, double c);

/// Scale-change comparison: the measured constant for factor c_big at scale
/// delta, against the product bound prod_{l=1..k} Delta_c(c_big*delta / c^l)
/// with k the smallest integer such that c^k >= c_big.
struct DoublingIterationCheck {
  double measured = 1.0;
  double bound = 1.0;
  int k = 0;
  bool holds = false;
};

DoublingIterationCheck doubling_iteration_bound(const FiniteQMMSpace& space, double c,
                                                double c_big, double delta);

/// Tail-mass ratios mu(X \ B(x0, R)) / mu(X \ B(x0, C*R)) over an R grid,
/// where C is the quasi-triangle constant.  Throws EmptyTail when the
/// denominator vanishes (R beyond the support).  liminf_estimate is the grid
/// minimum; monotone_growth is set when the ratios only ever increase along
/// the grid, the signature of a divergent tail ratio.
struct AtInfinityResult {
  std::size_t x0 = 0;
  std::vector<double> radii;
  std::vector<double> ratios;
  double liminf_estimate = 0.0;
  bool monotone_growth = false;
};

AtInfinityResult doubling_at_infinity(const FiniteQMMSpace& space, std::size_t x0,
                                      const std::vector<double>& radii);

/// Lower Ahlfors fit at a user-chosen exponent s: b = min over centers and grid
/// radii of mu(B(x, r)) / r^s.  Also reports the exact global doubling constant
/// at factor 2 and the induced dimension bound log2 of it; for any s at least
/// that bound, mass ratios obey mu(B(x, lambda*r)) <= 4^s lambda^s mu(B(x, r)).
struct AhlforsFit {
  double s = 1.0;
  double b = 0.0;
  double c_mu = 1.0;        // exact sup-over-scales doubling constant, factor 2
  double s_doubling = 0.0;  // log2(c_mu)
};

AhlforsFit ahlfors_lower_fit(const FiniteQMMSpace& space, double s,
                             const std::vector<double>& radii);

/// Exact value of sum_i mu_i / mu(B(x_i, r)) together with the closed-form
/// upper bound mu(X) / h(r) that always dominates it on a finite space.
struct IntegrabilityReport {
  double r = 0.0;
  double value = 0.0;
  double upper_bound = 0.0;  // mu(X)/h(r)
  bool within_bound = false;
};

IntegrabilityReport integrability_functional(const FiniteQMMSpace& space, double r);

}  // namespace qmms
