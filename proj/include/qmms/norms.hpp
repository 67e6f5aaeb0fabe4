#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qmms/space.hpp"

namespace qmms {

/// Which minimal-gradient functional is being computed.
///   sobolev          : a single gradient for all pairs, objective ||g||_p
///   triebel_lizorkin : level-binned gradients, objective || ||g_k||_{l^q(k)} ||_p
///   besov            : level-binned gradients, objective || ||g_k||_p ||_{l^q(k)}
enum class NormKind { sobolev, triebel_lizorkin, besov };

struct NormProblem {
  NormKind kind = NormKind::sobolev;
  double alpha = 1.0;
  double p = 2.0;       // in (0, inf)
  double q = kInf;      // in (0, inf]; ignored for sobolev
};

/// One pairwise constraint g_i + g_j >= c.
struct PairConstraint {
  std::size_t i = 0;
  std::size_t j = 0;
  double c = 0.0;
};

struct LevelConstraints {
  int level = 0;  // dyadic index k: pairs with 2^{-k-1} <= d < 2^{-k}
  std::vector<PairConstraint> pairs;
};

/// Constraints |u(x)-u(y)| <= d(x,y)^alpha (g_k(x)+g_k(y)) assembled per dyadic
/// level of the distance.  Both orientations of each pair are binned (they can
/// land on different levels when the distance is asymmetric); duplicates on a
/// level keep the largest bound.  Pairs with u(x) = u(y) are dropped.  With
/// collapse_levels the levels merge into a single constraint set (one shared
/// gradient), keeping the largest bound per unordered pair.
struct ConstraintSystem {
  std::vector<LevelConstraints> levels;  // ascending level order; empty levels omitted
  bool collapsed = false;
  std::size_t n = 0;
};

ConstraintSystem build_constraints(const FiniteQMMSpace& space, const std::vector<double>& u,
                                   double alpha, bool collapse_levels);

struct SolveOptions {
  int max_iterations = 100000;
  double tolerance = 1e-8;      // feasibility residual, relative to the constraint scale
  double gap_tolerance = 1e-6;  // duality-gap certification threshold, relative
  int multistart = 8;           // for exponents below 1 (nonconvex)
  unsigned long long seed = 0;
};

struct SolverInfo {
  int iterations = 0;
  double primal_residual = 0.0;
  double certified_gap = kNaN;  // feasible objective minus a dual lower bound
  bool certified = false;
  std::string status;  // "optimal", "upper_bound", "exact", "empty"
};

/// Levelwise gradient; the sobolev form stores a single row and leaves levels empty.
struct GradientSequence {
  std::vector<int> levels;
  std::vector<std::vector<double>> values;
};

struct NormResult {
  double seminorm = 0.0;
  double lp = 0.0;
  double full_norm = 0.0;  // seminorm + lp
  GradientSequence gradient;
  SolverInfo solver;
};

NormResult min_gradient_sobolev(const FiniteQMMSpace& space, const std::vector<double>& u,
                                double alpha, double p, const SolveOptions& opts = {});
NormResult min_gradient_besov(const FiniteQMMSpace& space, const std::vector<double>& u,
                              double alpha, double p, double q, const SolveOptions& opts = {});
/// q = inf routes through the exact identity with the sobolev form.
NormResult min_gradient_tl(const FiniteQMMSpace& space, const std::vector<double>& u,
                           double alpha, double p, double q, const SolveOptions& opts = {});
NormResult minimal_norm(const FiniteQMMSpace& space, const std::vector<double>& u,
                        const NormProblem& problem, const SolveOptions& opts = {});

/// Structural inequalities between the computed functionals, all at one (p, q):
///   i/ii) the q = inf seminorm never exceeds a finite-q seminorm;
///   iii)  the level-binned sup form agrees with the single-gradient form;
///   iv)   p = q makes the two level-binned forms agree;
///   v/vi) smoothness downgrade alpha+sigma -> alpha with an explicit gradient
///         sequence h and a closed-form bound (r is the target fine exponent).
struct EmbeddingChecks {
  double alpha = 0.0, p = 1.0, q = 1.0, sigma = 0.0, r = 1.0;
  double besov_q_inf = 0.0, besov_q = 0.0;
  bool i_holds = false;
  double tl_q_inf = 0.0, tl_q = 0.0;
  bool ii_holds = false;
  double iii_difference = 0.0;
  bool iii_holds = false;
  double tl_pp = 0.0, besov_pp = 0.0;
  bool iv_holds = false;
  double v_lhs = 0.0, v_h_norm = 0.0, v_rhs = 0.0;
  bool v_feasible = false, v_holds = false;
  double vi_lhs = 0.0, vi_h_norm = 0.0, vi_rhs = 0.0;
  bool vi_feasible = false, vi_holds = false;
};

EmbeddingChecks embs_check(const FiniteQMMSpace& space, const std::vector<double>& u,
                           double alpha, double p, double q, double sigma, double r,
                           const SolveOptions& opts = {});

/// Transition bump between disjoint sets, built on the chain-regularized
/// metric at exponent beta:  phi = min(1, dist_sigma(x, E0) / dist_sigma(E0, E1)).
/// phi vanishes on E0, equals 1 on E1, and its beta-Hoelder quotient with
/// respect to the regularized metric is at most 1/dist_sigma(E0, E1).
struct BumpResult {
  std::vector<double> phi;
  double beta = 1.0;
  double alpha = 1.0;
  double p = 1.0;
  double q = kInf;
  double dist_sigma = 0.0;      // regularized-metric distance between the sets
  double holder_bound = 0.0;    // 1 / dist_sigma
  double holder_measured = 0.0; // max |phi(x)-phi(y)| / sigma(x,y)
  double dist_d = 0.0;          // oriented distance from E0 to E1 in the raw metric
  double mass_off_e0 = 0.0;     // mu(X \ E0)
  double shape = 0.0;           // dist_d^{-alpha} * mass_off_e0^{1/p}
  NormResult norm_tl;
  NormResult norm_besov;
  double ratio_tl = 0.0;    // norm_tl.seminorm / shape
  double ratio_besov = 0.0;
};

BumpResult bump(const FiniteQMMSpace& space, const std::vector<std::size_t>& e0,
                const std::vector<std::size_t>& e1, double beta, double alpha, double p,
                double q, const SolveOptions& opts = {});

/// Smoothness downgrade of a feasible gradient sequence: given g feasible for u
/// at exponent alpha, beta < alpha, and a scale eps in (0, 1], produces h
/// feasible at beta:  h_k = eps^{alpha-beta} g_k on levels k >= K and
/// h_k = 2^beta 2^{k beta} |u| on levels k < K, where 2^{-K} <= eps < 2^{-K+1}.
struct DowngradeResult {
  int K = 0;
  double eps = 1.0;
  GradientSequence h;
  bool feasible = false;  // verified against the beta-level constraints
};

DowngradeResult downgrade_gradient(const FiniteQMMSpace& space, const std::vector<double>& u,
                                   const GradientSequence& g, double alpha, double beta,
                                   double eps);

/// Verifies that a level-binned gradient sequence is feasible for u at alpha
/// (largest violation of |u(x)-u(y)| <= d^alpha (g_k(x)+g_k(y)) over binned pairs).
double gradient_violation(const FiniteQMMSpace& space, const std::vector<double>& u,
                          const GradientSequence& g, double alpha);

/// Same for a single shared gradient (all pairs).
double gradient_violation_single(const FiniteQMMSpace& space, const std::vector<double>& u,
                                 const std::vector<double>& g, double alpha);

}  // namespace qmms
