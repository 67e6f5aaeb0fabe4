#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qmms/norms.hpp"
#include "qmms/space.hpp"

namespace qmms {

/// Metric of convergence in measure: integral of |f-g|/(1+|f-g|).
double l0_distance(const FiniteQMMSpace& space, const std::vector<double>& f,
                   const std::vector<double>& g);

// ---------------------------------------------------------------------------
// Uniform exceptional sets for a family with p-integrable upper gradients
// ---------------------------------------------------------------------------

struct ExceptionalSetsResult {
  double family_bound = 0.0;  ///< max over members of ||u||_p + ||g||_p
  double eta = 0.0;           ///< requested mass budget for the exceptional sets
  double lambda = 0.0;        ///< level cut
  double delta = 0.0;         ///< metric scale: |u(x)-u(y)| < eps off E when d < delta
  double eps = 0.0;           ///< oscillation target
  std::vector<std::vector<char>> exceptional;  ///< per member indicator of E(u)
  std::vector<double> exceptional_mass;
  bool uniform_small = false;  ///< every exceptional mass is below eta
};

/// For each member u with upper gradient g, cuts E(u) = {max(|u|, g) > lambda}
/// with lambda chosen from the family bound so that mu(E(u)) < eta, and
/// reports the scale delta below which u oscillates by less than eps off E(u).
ExceptionalSetsResult sobolev_exceptional_sets(const FiniteQMMSpace& space,
                                               const std::vector<std::vector<double>>& members,
                                               const std::vector<std::vector<double>>& gradients,
                                               double alpha, double p, double eps, double eta);

// ---------------------------------------------------------------------------
// Total boundedness certificates in the metric of convergence in measure
// ---------------------------------------------------------------------------

struct FrechetCell {
  std::size_t center = 0;
  std::vector<std::size_t> members;
};

struct FrechetResult {
  bool certified = false;
  std::string obstruction;         ///< empty when certified; otherwise the reason
  double obstruction_value = 0.0;  ///< quantitative payload for the obstruction
  double eps = 0.0;
  double delta_f = 0.0;            ///< quantization step eps / (1 + 2 mu(X))
  double lambda = 0.0;
  double delta = 0.0;              ///< target in-cell metric oscillation
  double kappa1 = 0.0;             ///< max d / rho over pairs
  double c_rho = 0.0;              ///< quasi-triangle constant of the chain metric
  double cell_radius = 0.0;
  std::vector<FrechetCell> cells;
  std::size_t quantization_levels = 0;  ///< M: values are delta_f * m, |m| <= M
  double net_size_log10 = 0.0;          ///< log10 of the (2M+1)^{#cells} net bound
  std::vector<double> member_errors;    ///< distance from each member to its net point
  double worst_cell_oscillation = 0.0;  ///< max |u(x)-u(y)| within a cell off E(u)
};

struct FrechetOptions {
  std::size_t cell_budget = 4096;  ///< refuse instead of building more cells
};

/// Attempts to certify that the family is totally bounded in the metric of
/// convergence in measure, by exhibiting a finite quantized net together with
/// per-member approximation errors below eps.  Refusal is a value: when a
/// quantitative obstruction is met, the result carries its description instead
/// of a certificate.
FrechetResult frechet_certify(const FiniteQMMSpace& space,
                              const std::vector<std::vector<double>>& members,
                              const std::vector<std::vector<double>>& gradients, double alpha,
                              double p, double eps, const FrechetOptions& options = {});

// ---------------------------------------------------------------------------
// Equi-integrability
// ---------------------------------------------------------------------------

struct EquiIntegrabilityResult {
  double delta = 0.0;
  double modulus_lower = 0.0;  ///< best value over atom subsets of mass <= delta
  double modulus_upper = 0.0;  ///< fractional relaxation bound
};

/// Knapsack estimate of sup { integral of |f|^p over E : mu(E) <= delta }.
EquiIntegrabilityResult equi_integrability_modulus(const FiniteQMMSpace& space,
                                                   const std::vector<double>& f, double p,
                                                   double delta);

// ---------------------------------------------------------------------------
// Non-compactness witnesses
// ---------------------------------------------------------------------------

struct BumpWitnessResult {
  double delta = 0.0;
  double separation = 0.0;  ///< center separation scale used by the greedy pass
  std::vector<std::size_t> centers;
  bool balls_disjoint = false;  ///< every small ball misses every other big ball
  std::vector<std::vector<double>> functions;  ///< normalized bumps f_j
  double min_gap_p = 0.0;   ///< min over pairs of ||f_k - f_l||_p^p
  bool gap_at_least_two = false;
  double doubling_delta = 0.0;              ///< measured doubling ratio at delta
  std::vector<double> holder_constants;     ///< H' per member (feasible gradient height)
  std::vector<double> norm_bounds;          ///< assembled norm bounds per member
  std::vector<double> solved_norms;         ///< solver values (when requested)
};

/// Builds the separated-bump family: greedy centers at separation
/// cd_tilde * cd^2 * delta, a bump per center supported in the big ball and
/// equal to one on the small ball, each normalized in L^p of its small ball.
/// The family has pairwise L^p gaps of at least 2^{1/p} while its norm bounds
/// stay controlled by the doubling ratio at delta.
BumpWitnessResult separated_bump_witness(const FiniteQMMSpace& space, double delta, double alpha,
                                         double p, double beta, const SolveOptions& opts = {},
                                         bool solve_norms = false);

struct TailWitnessResult {
  std::size_t x0 = 0;
  std::vector<double> radii;
  std::vector<double> tail_small;  ///< mu(X minus B(x0, R))
  std::vector<double> tail_big;    ///< mu(X minus B(x0, cd * R))
  std::vector<double> ratios;      ///< tail_small / tail_big
  std::vector<std::vector<double>> functions;  ///< f_N
  std::vector<double> unit_masses;             ///< integral over the far tail of |f_N|^p
  std::vector<double> holder_constants;
  std::vector<double> norm_bounds;
  std::vector<double> solved_norms;
  double equi_delta = 0.0;       ///< far-tail mass of the last member
  double modulus_at_delta = 0.0; ///< concentration of the last member at that mass
  bool not_equi_integrable = false;
};

/// Builds the escaping-tail family: each member vanishes on B(x0, R) and is a
/// constant multiple of one outside B(x0, cd * R), normalized to unit mass on
/// the far tail.  Unit masses are exact by construction; the norm bounds are
/// controlled by the measured at-infinity mass ratios.
TailWitnessResult tail_bump_witness(const FiniteQMMSpace& space, std::size_t x0,
                                    const std::vector<double>& radii, double alpha, double p,
                                    double beta, const SolveOptions& opts = {},
                                    bool solve_norms = false);

// ---------------------------------------------------------------------------
// The key localization inequality
// ---------------------------------------------------------------------------

struct KeyInequalityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double rhs_gradient_term = 0.0;  ///< the pure gradient part of the bound
  double rhs_window_term = 0.0;    ///< the averaged-window part
  double kappa = 0.0;              ///< metric comparability constant used
  double r = 0.0;
  bool holds = false;
};

/// Exact evaluation of both sides of the localization inequality that bounds
/// the nu-integral of |u|^p over D through the gradient and averaged window
/// terms at scale r.  The gradient must be feasible for u at exponent alpha.
KeyInequalityResult key_inequality_check(const FiniteQMMSpace& space,
                                         const std::vector<double>& u,
                                         const std::vector<double>& g,
                                         const std::vector<double>& nu,
                                         const std::vector<std::size_t>& d_set, double r,
                                         double alpha, double p);

// ---------------------------------------------------------------------------
// Interpolation and Holder comparisons
// ---------------------------------------------------------------------------

struct InterpolationResult {
  double p = 0.0, p_tilde = 0.0, p_star = 0.0, theta = 0.0;
  double lhs = 0.0, rhs = 0.0;
  bool holds = false;
};

/// ||f||_{p_tilde} <= ||f||_p^theta ||f||_{p_star}^{1-theta} with
/// 1/p_tilde = theta/p + (1-theta)/p_star; requires p < p_tilde < p_star.
InterpolationResult interpolation_check(const FiniteQMMSpace& space, const std::vector<double>& f,
                                        double p, double p_tilde, double p_star);

struct HolderLpResult {
  double p = 0.0, p_tilde = 0.0;
  double factor = 0.0;  ///< mu(X)^{1/p_tilde - 1/p}
  double lhs = 0.0, rhs = 0.0;
  bool holds = false;
};

/// On finite total mass, ||f||_{p_tilde} <= mu(X)^{1/p_tilde - 1/p} ||f||_p
/// for p_tilde < p.
HolderLpResult holder_lp_check(const FiniteQMMSpace& space, const std::vector<double>& f,
                               double p_tilde, double p);

}  // namespace qmms
