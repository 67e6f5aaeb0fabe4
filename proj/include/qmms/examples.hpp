#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qmms/space.hpp"

namespace qmms {

/// Machine-checkable closed-form bound attached to a generated space.
struct ReferenceBound {
  std::string key;          // stable identifier, e.g. "doubling_upper"
  std::string formula;      // closed form in the generator parameters, e.g. "2*c*exp((c*delta)^beta)"
  std::string description;
};

struct ReferenceCard {
  std::string generator;
  std::map<std::string, double> params;
  std::vector<ReferenceBound> bounds;
};

struct GeneratedSpace {
  FiniteQMMSpace space;
  ReferenceCard card;
};

/// One-dimensional density on an interval, described in log form so that very
/// small and very large values stay representable.
struct Density1D {
  enum class Family { exp_growth, gauss_decay, inv_exp };
  Family family = Family::gauss_decay;
  double beta = 1.0;

  /// log of the density at x > 0.
  double log_density(double x) const;
  /// Left end of the representable range (positive for inv_exp, else 0).
  double support_start() const;
  static Density1D exp_growth_density(double beta);   // density e^{x^beta}
  static Density1D gauss_decay_density(double beta);  // density e^{-x^beta}
  static Density1D inv_exp_density(double beta);      // density e^{-1/x^beta}
};

/// Atoms on a line with the |x-y| metric and prefix-sum mass queries; used for
/// high-resolution discretizations where a dense matrix is impossible.
struct LineSpace {
  std::vector<double> xs;      // sorted coordinates
  std::vector<double> masses;  // strictly positive
  std::vector<double> prefix;  // prefix[i] = sum masses[0..i-1], size n+1
  std::vector<double> suffix;  // suffix[i] = sum masses[i..n-1], size n+1

  std::size_t size() const { return xs.size(); }
  double total() const { return prefix.back(); }
  /// Mass of the strict window (lo, hi).  Windows deep in a decaying tail are
  /// resolved through the suffix sums (the prefix difference cancels to zero
  /// there), with direct summation as the last resort, so the result is
  /// positive whenever the window contains an atom.
  double mass_in(double lo, double hi) const;
  double ball_mass_at(double x, double r) const { return mass_in(x - r, x + r); }
};

LineSpace make_line_space(std::vector<double> xs, std::vector<double> masses);

/// Midpoint discretization of a density on (start, T] at `res` atoms per unit.
/// Atoms whose mass underflows to zero are dropped.
LineSpace discretize_density(const Density1D& density, double t_end, double res);

/// Exact doubling constant of a line space at one scale (max over atoms).
double line_doubling_constant(const LineSpace& line, double c, double delta);

/// h(r) on a line space.
double line_h_value(const LineSpace& line, double r);

/// Dense space from a line space (rejects n > 3000).
FiniteQMMSpace line_to_space(const LineSpace& line);

/// Closed-form doubling upper bound for the three density families.
double density_doubling_bound(Density1D::Family family, double beta, double c, double delta);
ReferenceBound density_doubling_reference(Density1D::Family family);

/// Truncation curve for the integrability functional of a 1-D density:
/// values[k] = sum over atoms below T_k of mass/ball-mass, with the schedule
/// T_k = t0 * 2^k.  Ball masses always use atoms out to T_k + r, so values are
/// partial sums of the untruncated functional and increase in k.
struct DensityCurve {
  double r = 1.0;
  double tol = 1e-3;
  std::vector<double> truncations;
  std::vector<double> values;
  std::vector<double> increments;
  std::string verdict;  // "integrable", "divergent", "inconclusive"
  bool range_exhausted = false;  // stopped because the density left double range
};

DensityCurve density_integrability_curve(const Density1D& density, double r, double res,
                                         double tol, double t0, int max_doublings);

/// Comb structure: a spine of length 1/4 carrying density e^{-y^2}, with teeth
/// attached recursively.  A tooth at nesting level n has length 2^{-n-2} and
/// carries density e^{-(y+k)^2} where k is its enumeration index.  Teeth are
/// enumerated through prime codes: the j-th allowed tooth value maps to the
/// j-th prime, a tooth is coded by the product of the primes along its
/// attachment tuple, and teeth are sorted by code (ties lexicographically), so
/// every ancestor precedes its descendants.
struct CombTooth {
  int level = 1;                // nesting depth, >= 1
  int k_index = 0;              // enumeration index, 1-based
  long long code = 0;           // product of primes along the tuple
  std::vector<int> tuple;       // tooth-value choices (1-based), length = level
  std::vector<double> coords;   // (v_{j1}, v_{j2}/2, ..., v_{jn}/2^{n-1})
  double length = 0.0;          // 2^{-level-2}
};

struct CombDescription {
  int depth = 1;
  int branching = 1;
  std::vector<double> tooth_values;  // equally spaced in (0, 1/4)
  std::vector<CombTooth> teeth;      // sorted by k_index
};

CombDescription build_comb(int depth, int branching);

/// Distance between two comb points given as coordinate vectors: with kappa
/// the first differing index, d = |x_kappa - y_kappa| + sum_{i>kappa}(x_i+y_i).
double comb_distance(const std::vector<double>& a, const std::vector<double>& b);

/// Integrability experiment on the truncated comb, computed in log space so
/// that deep teeth (densities as small as e^{-(k+1)^2}) stay representable.
struct CombExperiment {
  int depth = 1;
  int branching = 1;
  int resolution = 0;  // atoms per unit length
  double r = 0.1;
  double j0_term = 0.0;
  double j0_bound = 0.0;  // exp(1/16)/r
  std::vector<double> tooth_terms;   // indexed by k-1
  std::vector<double> tooth_bounds;  // closed-form tail bound per tooth
  std::vector<double> partial_sums;  // j0 plus teeth up to k
  double total = 0.0;
  bool j0_within = false;  // j0_term <= 1.05 * j0_bound
  bool cauchy = false;     // trailing increments small relative to the total
};

CombExperiment comb_integrability_experiment(int depth, int branching, int resolution, double r);

/// Finite slice of the dyadic-tail example: density 1 on [0,1) and
/// a_k * exp(2^k x - 2*4^k) on [2^k, 2^{k+1}) with a_k = e^{4^k}/(e^{4^k}-1),
/// so each band carries mass exactly 2^{-k}.  bands limits the number of
/// exponential bands (band k requires e^{-4^k} to stay representable).
LineSpace make_dyadic_tail_line(int bands, double res);
FiniteQMMSpace make_dyadic_tail_space(int bands, double res);

/// Named generator entry point.
GeneratedSpace generate(const std::string& name, const std::map<std::string, double>& params);

std::vector<std::string> generator_names();

}  // namespace qmms
