#include "qmms/norms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "qmms/regularize.hpp"

namespace qmms {

namespace {

void check_exponent_p(double p) {
  if (!(p > 0.0) || p == kInf)
    fail(ValidationError::Kind::BadExponents, "p must lie in (0, inf)");
}

void check_exponent_q(double q) {
  if (!(q > 0.0))
    fail(ValidationError::Kind::BadExponents, "q must lie in (0, inf]");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    fail(ValidationError::Kind::BadExponents, "alpha must be positive and finite");
}

// ---------------------------------------------------------------------------
// Core problem: minimize sum_i w_i g_i^rho subject to g_i + g_j >= c_e, g >= 0.
// ---------------------------------------------------------------------------

struct CoreResult {
  std::vector<double> g;
  double objective = 0.0;   // at the returned (exactly feasible) g
  double dual_bound = kNaN; // valid lower bound on the optimum, NaN if unavailable
  std::vector<double> lambda;
  int iterations = 0;
  double residual = 0.0;    // worst violation before the feasibility polish
  bool certified = false;
};

double prox_power(double w, double rho, double tau, double z) {
  // argmin_{t >= 0} w t^rho + (t - z)^2 / (2 tau)
  if (z <= 0.0) return 0.0;
  if (rho == 1.0) return std::max(0.0, z - tau * w);
  if (rho == 2.0) return z / (1.0 + 2.0 * w * tau);
  // Monotone root of tau*w*rho*t^{rho-1} + t - z on (0, z): plain bisection.
  double lo = 0.0, hi = z;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = tau * w * rho * std::pow(mid, rho - 1.0) + mid - z;
    (f < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double core_objective(const std::vector<double>& w, double rho, const std::vector<double>& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += w[i] * pow_nn(g[i], rho);
  return s;
}

double worst_violation(const std::vector<PairConstraint>& pairs, const std::vector<double>& g) {
  double v = 0.0;
  for (const PairConstraint& e : pairs) v = std::max(v, e.c - g[e.i] - g[e.j]);
  return std::max(v, 0.0);
}

/// Lifts a candidate to exact feasibility: adds half the worst violation to
/// every point that appears in a constraint.
void polish_feasible(const std::vector<PairConstraint>& pairs, std::vector<double>& g,
                     const std::vector<int>& degree) {
  const double lift = 0.5 * worst_violation(pairs, g);
  if (lift <= 0.0) return;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (degree[i] > 0) g[i] += lift;
}

/// Lower bound via the closed-form Lagrangian dual at multipliers lambda >= 0:
///   sum_e c_e lambda_e - sum_i sup_{t>=0} (s_i t - w_i t^rho),   s_i = sum_{e ~ i} lambda_e.
/// For rho = 1 the multipliers are first scaled into the dual-feasible region.
double core_dual_value(const std::vector<double>& w, double rho,
                       const std::vector<PairConstraint>& pairs, std::vector<double>& lambda) {
  const std::size_t n = w.size();
  std::vector<double> s(n, 0.0);
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    s[pairs[e].i] += lambda[e];
    s[pairs[e].j] += lambda[e];
  }
  if (rho == 1.0) {
    double t = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (s[i] > w[i]) t = std::min(t, w[i] / s[i]);
    if (t < 1.0) {
      for (double& l : lambda) l *= t;
    }
    double v = 0.0;
    for (std::size_t e = 0; e < pairs.size(); ++e) v += pairs[e].c * lambda[e];
    return v;
  }
  double v = 0.0;
  for (std::size_t e = 0; e < pairs.size(); ++e) v += pairs[e].c * lambda[e];
  const double conj = rho / (rho - 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i] <= 0.0) continue;
    v -= (rho - 1.0) * w[i] * std::pow(s[i] / (rho * w[i]), conj);
  }
  return v;
}

/// Diagonally preconditioned primal-dual iteration for rho >= 1.
CoreResult solve_core_convex(std::size_t n, const std::vector<double>& w, double rho,
                             const std::vector<PairConstraint>& pairs, const SolveOptions& opts,
                             const std::vector<double>* warm) {
  CoreResult out;
  out.g.assign(n, 0.0);
  out.lambda.assign(pairs.size(), 0.0);
  if (pairs.empty()) {
    out.dual_bound = 0.0;
    out.certified = true;
    return out;
  }
  double scale = 0.0;
  for (const PairConstraint& e : pairs) scale = std::max(scale, e.c);
  std::vector<int> degree(n, 0);
  for (const PairConstraint& e : pairs) {
    ++degree[e.i];
    ++degree[e.j];
  }
  std::vector<double> tau(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (degree[i] > 0) tau[i] = 1.0 / degree[i];
  const double sigma = 0.5;

  // Work on the rescaled constraints c/scale; weights are unchanged (a common
  // positive factor in the objective does not move the minimizer).
  std::vector<double> g(n, 0.0), g_bar(n, 0.0), g_old(n, 0.0);
  if (warm && warm->size() == n)
    for (std::size_t i = 0; i < n; ++i) g[i] = std::max(0.0, (*warm)[i] / scale);
  g_bar = g;
  std::vector<double> y(pairs.size(), 0.0), s(n, 0.0);

  const double wscale = std::pow(scale, rho - 1.0);  // converts scaled multipliers back
  double best_obj = kInf;
  std::vector<double> best_g;
  double best_gap = kInf, best_residual = 0.0;
  std::vector<double> best_lambda;

  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      const double slack = g_bar[pairs[e].i] + g_bar[pairs[e].j] - pairs[e].c / scale;
      y[e] = std::min(0.0, y[e] + sigma * slack);
    }
    std::fill(s.begin(), s.end(), 0.0);
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      s[pairs[e].i] += y[e];
      s[pairs[e].j] += y[e];
    }
    g_old = g;
    for (std::size_t i = 0; i < n; ++i) {
      if (degree[i] == 0) continue;
      // The scaled iteration keeps the original weights; the change of units
      // is absorbed into the multipliers below (lambda = -y * scale^{rho-1}).
      g[i] = prox_power(w[i], rho, tau[i], g[i] - tau[i] * s[i]);
    }
    for (std::size_t i = 0; i < n; ++i) g_bar[i] = 2.0 * g[i] - g_old[i];

    if ((iter + 1) % 64 == 0 || iter + 1 == opts.max_iterations) {
      std::vector<double> cand(n);
      for (std::size_t i = 0; i < n; ++i) cand[i] = g[i] * scale;
      const double residual = worst_violation(pairs, cand);
      polish_feasible(pairs, cand, degree);
      const double obj = core_objective(w, rho, cand);
      std::vector<double> lam(pairs.size());
      for (std::size_t e = 0; e < pairs.size(); ++e) lam[e] = -y[e] * wscale;
      const double dual = core_dual_value(w, rho, pairs, lam);
      const double gap = obj - dual;
      if (obj < best_obj) {
        best_obj = obj;
        best_g = cand;
        best_gap = gap;
        best_residual = residual;
        best_lambda = lam;
      }
      if (residual <= opts.tolerance * scale && gap <= opts.gap_tolerance * (1.0 + obj)) {
        ++iter;
        break;
      }
    }
  }
  if (!std::isfinite(best_obj))
    fail(ValidationError::Kind::SolverDiverged, "core solver produced a nonfinite objective");
  out.g = std::move(best_g);
  out.objective = best_obj;
  out.lambda = std::move(best_lambda);
  out.dual_bound = best_obj - best_gap;
  out.iterations = iter;
  out.residual = best_residual;
  out.certified = best_gap <= opts.gap_tolerance * (1.0 + best_obj);
  return out;
}

/// Drops every coordinate to its lower envelope (the objective is increasing
/// coordinatewise below 1, so this only improves) until nothing moves.
void lower_envelope_sweep(const std::vector<PairConstraint>& pairs,
                          const std::vector<int>& degree,
                          const std::vector<std::vector<std::size_t>>& touching,
                          const std::vector<std::size_t>& order, std::vector<double>& g) {
  for (int sweep = 0; sweep < 200; ++sweep) {
    bool changed = false;
    for (std::size_t i : order) {
      if (degree[i] == 0) continue;
      double lower = 0.0;
      for (std::size_t e : touching[i]) {
        const std::size_t other = pairs[e].i == i ? pairs[e].j : pairs[e].i;
        lower = std::max(lower, pairs[e].c - g[other]);
      }
      lower = std::max(lower, 0.0);
      if (g[i] > lower + 1e-15 * (1.0 + lower)) {
        g[i] = lower;
        changed = true;
      }
    }
    if (!changed) break;
  }
}

/// 2-exchange between vertices of the feasible set: zeroing one coordinate and
/// lifting its neighbours to carry the load.  A concave objective attains its
/// minimum at such extreme points, which plain coordinate descent never leaves
/// a stalled split for.
void vertex_improve(const std::vector<double>& w, double rho,
                    const std::vector<PairConstraint>& pairs, const std::vector<int>& degree,
                    const std::vector<std::vector<std::size_t>>& touching,
                    const std::vector<std::size_t>& order, std::vector<double>& g) {
  const std::size_t n = w.size();
  std::vector<double> raised(n, 0.0);
  std::vector<std::size_t> raised_ids;
  for (int round = 0; round < 50; ++round) {
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (degree[i] == 0 || g[i] <= 0.0) continue;
      double delta = -w[i] * pow_nn(g[i], rho);
      raised_ids.clear();
      for (std::size_t e : touching[i]) {
        const std::size_t j = pairs[e].i == i ? pairs[e].j : pairs[e].i;
        const double cur = raised[j] > 0.0 ? raised[j] : g[j];
        if (cur < pairs[e].c) {
          delta += w[j] * (pow_nn(pairs[e].c, rho) - pow_nn(g[j], rho));
          if (raised[j] > 0.0) delta -= w[j] * (pow_nn(raised[j], rho) - pow_nn(g[j], rho));
          if (raised[j] == 0.0) raised_ids.push_back(j);
          raised[j] = pairs[e].c;
        }
      }
      if (delta < -1e-14 * (1.0 + std::abs(delta))) {
        g[i] = 0.0;
        for (std::size_t j : raised_ids) g[j] = std::max(g[j], raised[j]);
        lower_envelope_sweep(pairs, degree, touching, order, g);
        improved = true;
      }
      for (std::size_t j : raised_ids) raised[j] = 0.0;
    }
    if (!improved) break;
  }
}

/// Monotone coordinate descent for exponents below 1, from a deterministic
/// half-load start, a greedy cheapest-endpoint vertex start, and several
/// seeded random starts; every stall is then refined by vertex exchanges and
/// the best candidate is kept.  Upper bound only.
CoreResult solve_core_multistart(std::size_t n, const std::vector<double>& w, double rho,
                                 const std::vector<PairConstraint>& pairs,
                                 const SolveOptions& opts) {
  CoreResult out;
  out.g.assign(n, 0.0);
  out.lambda.assign(pairs.size(), 0.0);
  if (pairs.empty()) {
    out.dual_bound = 0.0;
    return out;
  }
  std::vector<int> degree(n, 0);
  std::vector<std::vector<std::size_t>> touching(n);
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    ++degree[pairs[e].i];
    ++degree[pairs[e].j];
    touching[pairs[e].i].push_back(e);
    touching[pairs[e].j].push_back(e);
  }
  std::vector<double> base(n, 0.0);
  for (const PairConstraint& e : pairs) {
    base[e.i] = std::max(base[e.i], 0.5 * e.c);
    base[e.j] = std::max(base[e.j], 0.5 * e.c);
  }
  std::vector<double> greedy(n, 0.0);
  for (const PairConstraint& e : pairs) {
    if (greedy[e.i] + greedy[e.j] >= e.c) continue;
    const std::size_t cheap = w[e.i] <= w[e.j] ? e.i : e.j;
    const std::size_t other = cheap == e.i ? e.j : e.i;
    greedy[cheap] = std::max(greedy[cheap], e.c - greedy[other]);
  }
  Rng rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> fac(0.25, 2.0);

  double best_obj = kInf;
  std::vector<double> best_g;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int start = -1; start < std::max(1, opts.multistart); ++start) {
    std::vector<double> g = start < 0 ? greedy : base;
    if (start > 0) {
      for (double& v : g) v *= fac(rng);
      std::shuffle(order.begin(), order.end(), rng);
    }
    polish_feasible(pairs, g, degree);
    lower_envelope_sweep(pairs, degree, touching, order, g);
    vertex_improve(w, rho, pairs, degree, touching, order, g);
    const double obj = core_objective(w, rho, g);
    if (obj < best_obj) {
      best_obj = obj;
      best_g = g;
    }
  }
  out.g = std::move(best_g);
  out.objective = best_obj;
  out.residual = worst_violation(pairs, out.g);
  return out;
}

CoreResult core_solve(std::size_t n, const std::vector<double>& w, double rho,
                      const std::vector<PairConstraint>& pairs, const SolveOptions& opts,
                      const std::vector<double>* warm = nullptr) {
  if (rho >= 1.0) return solve_core_convex(n, w, rho, pairs, opts, warm);
  return solve_core_multistart(n, w, rho, pairs, opts);
}

}  // namespace

// ---------------------------------------------------------------------------
// Constraint assembly
// ---------------------------------------------------------------------------

ConstraintSystem build_constraints(const FiniteQMMSpace& space, const std::vector<double>& u,
                                   double alpha, bool collapse_levels) {
  validate_function(space, u);
  check_alpha(alpha);
  const std::size_t n = space.size();
  ConstraintSystem system;
  system.collapsed = collapse_levels;
  system.n = n;
  // (level, i, j) -> strongest bound; ordered pairs are binned separately and
  // folded onto the unordered key.
  std::map<std::pair<int, std::pair<std::size_t, std::size_t>>, double> bounds;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double du = std::abs(u[i] - u[j]);
      if (du == 0.0) continue;
      const double d = space.dist(i, j);
      const int level = collapse_levels ? 0 : dyadic_level(d);
      const double c = du / std::pow(d, alpha);
      auto key = std::make_pair(level, std::minmax(i, j));
      auto [it, inserted] = bounds.emplace(key, c);
      if (!inserted) it->second = std::max(it->second, c);
    }
  }
  for (const auto& [key, c] : bounds) {
    if (system.levels.empty() || system.levels.back().level != key.first) {
      system.levels.push_back({key.first, {}});
    }
    system.levels.back().pairs.push_back({key.second.first, key.second.second, c});
  }
  return system;
}

double gradient_violation_single(const FiniteQMMSpace& space, const std::vector<double>& u,
                                 const std::vector<double>& g, double alpha) {
  const ConstraintSystem system = build_constraints(space, u, alpha, true);
  if (system.levels.empty()) return 0.0;
  return worst_violation(system.levels.front().pairs, g);
}

double gradient_violation(const FiniteQMMSpace& space, const std::vector<double>& u,
                          const GradientSequence& g, double alpha) {
  const ConstraintSystem system = build_constraints(space, u, alpha, false);
  double worst = 0.0;
  for (const LevelConstraints& level : system.levels) {
    const auto it = std::find(g.levels.begin(), g.levels.end(), level.level);
    if (it == g.levels.end()) {
      for (const PairConstraint& e : level.pairs) worst = std::max(worst, e.c);
      continue;
    }
    const std::vector<double>& row = g.values[static_cast<std::size_t>(it - g.levels.begin())];
    worst = std::max(worst, worst_violation(level.pairs, row));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Norm drivers
// ---------------------------------------------------------------------------

namespace {

NormResult empty_result(const FiniteQMMSpace& space, const std::vector<double>& u, double p) {
  NormResult result;
  result.lp = lp_norm(space, u, p);
  result.full_norm = result.lp;
  result.solver.status = "empty";
  result.solver.certified = true;
  result.solver.certified_gap = 0.0;
  return result;
}

}  // namespace

NormResult min_gradient_sobolev(const FiniteQMMSpace& space, const std::vector<double>& u,
                                double alpha, double p, const SolveOptions& opts) {
  check_exponent_p(p);
  const ConstraintSystem system = build_constraints(space, u, alpha, true);
  NormResult result = empty_result(space, u, p);
  result.gradient.values.assign(1, std::vector<double>(space.size(), 0.0));
  if (system.levels.empty()) return result;

  const CoreResult core =
      core_solve(space.size(), space.weights(), p, system.levels.front().pairs, opts);
  result.gradient.values[0] = core.g;
  result.seminorm = std::pow(core.objective, 1.0 / p);
  result.full_norm = result.seminorm + result.lp;
  result.solver.iterations = core.iterations;
  result.solver.primal_residual = core.residual;
  result.solver.certified = core.certified;
  result.solver.status = p >= 1.0 ? (core.certified ? "optimal" : "max_iterations") : "upper_bound";
  if (std::isfinite(core.dual_bound)) {
    const double dual_norm = std::pow(std::max(core.dual_bound, 0.0), 1.0 / p);
    result.solver.certified_gap = result.seminorm - dual_norm;
  }
  return result;
}

NormResult min_gradient_besov(const FiniteQMMSpace& space, const std::vector<double>& u,
                              double alpha, double p, double q, const SolveOptions& opts) {
  check_exponent_p(p);
  check_exponent_q(q);
  const ConstraintSystem system = build_constraints(space, u, alpha, false);
  NormResult result = empty_result(space, u, p);
  if (system.levels.empty()) return result;

  std::vector<double> level_norms, level_dual_norms;
  bool all_certified = true;
  int iterations = 0;
  double residual = 0.0;
  for (const LevelConstraints& level : system.levels) {
    const CoreResult core = core_solve(space.size(), space.weights(), p, level.pairs, opts);
    result.gradient.levels.push_back(level.level);
    result.gradient.values.push_back(core.g);
    level_norms.push_back(std::pow(core.objective, 1.0 / p));
    level_dual_norms.push_back(std::isfinite(core.dual_bound)
                                   ? std::pow(std::max(core.dual_bound, 0.0), 1.0 / p)
                                   : 0.0);
    all_certified = all_certified && core.certified;
    iterations += core.iterations;
    residual = std::max(residual, core.residual);
  }
  // Levels are independent, so the seminorm is the l^q combination of the
  // per-level minima; this is exact for every q in (0, inf].
  result.seminorm = lq_combine(level_norms, q);
  result.full_norm = result.seminorm + result.lp;
  result.solver.iterations = iterations;
  result.solver.primal_residual = residual;
  result.solver.certified = all_certified && p >= 1.0;
  result.solver.status = p >= 1.0 ? (all_certified ? "optimal" : "max_iterations") : "upper_bound";
  result.solver.certified_gap = result.seminorm - lq_combine(level_dual_norms, q);
  return result;
}

namespace {

double tl_objective(const FiniteQMMSpace& space, const std::vector<std::vector<double>>& rows,
                    double p, double q) {
  const std::size_t n = space.size();
  double total = 0.0;
  std::vector<double> column(rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < rows.size(); ++k) column[k] = rows[k][i];
    total += space.mu(i) * pow_nn(lq_combine(column, q), p);
  }
  return total;
}

/// Dual lower bound for the level-binned l^q-inside form at multipliers
/// lambda (per level, per constraint): sum c lambda minus the conjugate
/// sum_i sup_v ( <s_i, v> - mu_i ||v||_q^p ), evaluated through the dual norm.
double tl_dual_value(const FiniteQMMSpace& space, const ConstraintSystem& system,
                     std::vector<std::vector<double>>& lambda, double p, double q) {
  const std::size_t n = space.size();
  std::vector<std::vector<double>> s(system.levels.size(), std::vector<double>(n, 0.0));
  double linear = 0.0;
  for (std::size_t k = 0; k < system.levels.size(); ++k) {
    for (std::size_t e = 0; e < system.levels[k].pairs.size(); ++e) {
      const PairConstraint& pc = system.levels[k].pairs[e];
      s[k][pc.i] += lambda[k][e];
      s[k][pc.j] += lambda[k][e];
      linear += pc.c * lambda[k][e];
    }
  }
  // Dual norm of the per-point level vector s_i.
  std::vector<double> dual_norm(n, 0.0);
  const double q_conj = q > 1.0 ? q / (q - 1.0) : kInf;
  std::vector<double> column(system.levels.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < system.levels.size(); ++k) column[k] = s[k][i];
    dual_norm[i] = q > 1.0 ? lq_combine(column, q_conj) : lq_combine(column, kInf);
  }
  if (p == 1.0) {
    double t = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (dual_norm[i] > space.mu(i)) t = std::min(t, space.mu(i) / dual_norm[i]);
    if (t < 1.0)
      for (auto& row : lambda)
        for (double& l : row) l *= t;
    return t * linear;
  }
  double v = linear;
  const double conj = p / (p - 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (dual_norm[i] <= 0.0) continue;
    v -= (p - 1.0) * space.mu(i) * std::pow(dual_norm[i] / (p * space.mu(i)), conj);
  }
  return v;
}

/// Coordinate descent over all levels for exponents below 1.
NormResult tl_multistart(const FiniteQMMSpace& space, const std::vector<double>& u,
                         const ConstraintSystem& system, double p, double q,
                         const SolveOptions& opts) {
  NormResult result = empty_result(space, u, p);
  const std::size_t n = space.size();
  const std::size_t levels = system.levels.size();
  std::vector<std::vector<double>> best_rows;
  double best_obj = kInf;
  Rng rng(opts.seed ^ 0xc2b2ae3d27d4eb4fULL);
  std::uniform_real_distribution<double> fac(0.25, 2.0);
  for (int start = 0; start < std::max(1, opts.multistart); ++start) {
    std::vector<std::vector<double>> rows(levels, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < levels; ++k) {
      for (const PairConstraint& e : system.levels[k].pairs) {
        double c = 0.5 * e.c;
        if (start > 0) c *= fac(rng);
        rows[k][e.i] = std::max(rows[k][e.i], c);
        rows[k][e.j] = std::max(rows[k][e.j], c);
      }
      const double lift = 0.5 * worst_violation(system.levels[k].pairs, rows[k]);
      if (lift > 0.0)
        for (const PairConstraint& e : system.levels[k].pairs) {
          rows[k][e.i] += lift;
          rows[k][e.j] += lift;
        }
    }
    for (int sweep = 0; sweep < 200; ++sweep) {
      bool changed = false;
      for (std::size_t k = 0; k < levels; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          double lower = 0.0;
          for (const PairConstraint& e : system.levels[k].pairs) {
            if (e.i == i) lower = std::max(lower, e.c - rows[k][e.j]);
            if (e.j == i) lower = std::max(lower, e.c - rows[k][e.i]);
          }
          if (rows[k][i] > lower + 1e-15 * (1.0 + lower)) {
            rows[k][i] = lower;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    const double obj = tl_objective(space, rows, p, q);
    if (obj < best_obj) {
      best_obj = obj;
      best_rows = rows;
    }
  }
  for (std::size_t k = 0; k < levels; ++k) {
    result.gradient.levels.push_back(system.levels[k].level);
    result.gradient.values.push_back(best_rows[k]);
  }
  result.seminorm = std::pow(best_obj, 1.0 / p);
  result.full_norm = result.seminorm + result.lp;
  result.solver.status = "upper_bound";
  return result;
}

}  // namespace

NormResult min_gradient_tl(const FiniteQMMSpace& space, const std::vector<double>& u,
                           double alpha, double p, double q, const SolveOptions& opts) {
  check_exponent_p(p);
  check_exponent_q(q);
  if (q == kInf) {
    // Exact identity: the sup-over-levels form coincides with the single
    // shared gradient, so route through the collapsed problem.
    NormResult result = min_gradient_sobolev(space, u, alpha, p, opts);
    if (result.solver.status == "optimal") result.solver.status = "exact";
    return result;
  }
  const ConstraintSystem system = build_constraints(space, u, alpha, false);
  if (system.levels.empty()) return empty_result(space, u, p);
  if (p < 1.0 || q < 1.0) return tl_multistart(space, u, system, p, q, opts);

  const std::size_t n = space.size();
  const std::size_t levels = system.levels.size();

  // Initialize from independent per-level solves (exact when p = q).
  std::vector<std::vector<double>> rows(levels);
  std::vector<std::vector<double>> lambda(levels);
  int iterations = 0;
  double residual = 0.0;
  for (std::size_t k = 0; k < levels; ++k) {
    const CoreResult core = core_solve(n, space.weights(), p, system.levels[k].pairs, opts);
    rows[k] = core.g;
    lambda[k] = core.lambda;
    iterations += core.iterations;
    residual = std::max(residual, core.residual);
  }

  double objective = tl_objective(space, rows, p, q);
  if (p != q) {
    // Majorize-minimize: each outer round replaces the coupling across levels
    // by a separable tangent surrogate and re-solves the levels with modified
    // weights.  The surrogate touches the objective at the current iterate, so
    // the true objective is nonincreasing along the rounds.
    const double r_exp = p > q ? p / q : q / p;
    for (int round = 0; round < 60; ++round) {
      std::vector<double> t(n, 0.0);
      std::vector<double> column(levels);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < levels; ++k) column[k] = rows[k][i];
        t[i] = 0.0;
        for (double v : column) t[i] += pow_nn(v, q);
      }
      double t_floor = 0.0;
      for (double v : t) t_floor = std::max(t_floor, v);
      t_floor = std::max(t_floor * 1e-12, 1e-300);
      for (double& v : t) v = std::max(v, t_floor);

      double new_objective = objective;
      if (p > q) {
        // (sum_k a_k)^{p/q} = min over simplex weights m of sum_k a_k^{p/q} m_k^{1-p/q};
        // with a_k = g_k^q the surrogate is per-level weighted p-th powers.
        for (std::size_t k = 0; k < levels; ++k) {
          std::vector<double> w(n);
          for (std::size_t i = 0; i < n; ++i) {
            double m = pow_nn(rows[k][i], q) / t[i];
            m = std::max(m, 1e-12);
            w[i] = space.mu(i) * std::pow(m, 1.0 - r_exp);
          }
          const CoreResult core = core_solve(n, w, p, system.levels[k].pairs, opts, &rows[k]);
          rows[k] = core.g;
          lambda[k] = core.lambda;
          iterations += core.iterations;
          residual = std::max(residual, core.residual);
        }
      } else {
        // p < q: t^{p/q} is concave in t = sum_k g_k^q, so its tangent gives a
        // separable upper bound with per-level weighted q-th powers.
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i)
          w[i] = space.mu(i) * (p / q) * std::pow(t[i], p / q - 1.0);
        for (std::size_t k = 0; k < levels; ++k) {
          const CoreResult core = core_solve(n, w, q, system.levels[k].pairs, opts, &rows[k]);
          rows[k] = core.g;
          lambda[k] = core.lambda;
          iterations += core.iterations;
          residual = std::max(residual, core.residual);
        }
      }
      new_objective = tl_objective(space, rows, p, q);
      const bool done = objective - new_objective <= 1e-10 * (1.0 + objective);
      objective = std::min(objective, new_objective);
      if (done) break;
    }
  }

  NormResult result = empty_result(space, u, p);
  for (std::size_t k = 0; k < levels; ++k) {
    result.gradient.levels.push_back(system.levels[k].level);
    result.gradient.values.push_back(rows[k]);
  }
  result.seminorm = std::pow(objective, 1.0 / p);
  result.full_norm = result.seminorm + result.lp;
  result.solver.iterations = iterations;
  result.solver.primal_residual = residual;
  const double dual = tl_dual_value(space, system, lambda, p, q);
  const double gap = objective - std::max(dual, 0.0);
  result.solver.certified_gap =
      result.seminorm - std::pow(std::max(dual, 0.0), 1.0 / p);
  result.solver.certified = gap <= opts.gap_tolerance * (1.0 + objective);
  result.solver.status = result.solver.certified ? "optimal" : "upper_bound";
  return result;
}

NormResult minimal_norm(const FiniteQMMSpace& space, const std::vector<double>& u,
                        const NormProblem& problem, const SolveOptions& opts) {
  check_alpha(problem.alpha);
  switch (problem.kind) {
    case NormKind::sobolev:
      return min_gradient_sobolev(space, u, problem.alpha, problem.p, opts);
    case NormKind::triebel_lizorkin:
      return min_gradient_tl(space, u, problem.alpha, problem.p, problem.q, opts);
    case NormKind::besov:
      return min_gradient_besov(space, u, problem.alpha, problem.p, problem.q, opts);
  }
  fail(ValidationError::Kind::InvalidParams, "unknown norm kind");
}

// ---------------------------------------------------------------------------
// Embedding checks
// ---------------------------------------------------------------------------

EmbeddingChecks embs_check(const FiniteQMMSpace& space, const std::vector<double>& u,
                           double alpha, double p, double q, double sigma, double r,
                           const SolveOptions& opts) {
  check_alpha(alpha);
  check_exponent_p(p);
  check_exponent_q(q);
  if (!(sigma > 0.0) || !(r > 0.0) || r == kInf)
    fail(ValidationError::Kind::BadExponents, "embs_check: need sigma > 0 and finite r > 0");
  EmbeddingChecks checks;
  checks.alpha = alpha;
  checks.p = p;
  checks.q = q;
  checks.sigma = sigma;
  checks.r = r;
  const double slack = 1e-7;

  const NormResult besov_inf = min_gradient_besov(space, u, alpha, p, kInf, opts);
  const NormResult besov_q = min_gradient_besov(space, u, alpha, p, q, opts);
  checks.besov_q_inf = besov_inf.seminorm;
  checks.besov_q = besov_q.seminorm;
  checks.i_holds = besov_inf.seminorm <= besov_q.seminorm * (1.0 + slack) + slack;

  const NormResult tl_inf = min_gradient_tl(space, u, alpha, p, kInf, opts);
  const NormResult tl_q = min_gradient_tl(space, u, alpha, p, q, opts);
  checks.tl_q_inf = tl_inf.seminorm;
  checks.tl_q = tl_q.seminorm;
  checks.ii_holds = tl_inf.seminorm <= tl_q.seminorm * (1.0 + slack) + slack;

  const NormResult sobolev = min_gradient_sobolev(space, u, alpha, p, opts);
  checks.iii_difference = std::abs(tl_inf.seminorm - sobolev.seminorm);
  checks.iii_holds = checks.iii_difference <= 1e-6 * (1.0 + sobolev.seminorm);

  const NormResult tl_pp = min_gradient_tl(space, u, alpha, p, p, opts);
  const NormResult besov_pp = min_gradient_besov(space, u, alpha, p, p, opts);
  checks.tl_pp = tl_pp.seminorm;
  checks.besov_pp = besov_pp.seminorm;
  checks.iv_holds = std::abs(tl_pp.seminorm - besov_pp.seminorm) <=
                    1e-6 * (1.0 + std::max(tl_pp.seminorm, besov_pp.seminorm));

  const double lp = lp_norm(space, u, p);
  const ConstraintSystem alpha_system = build_constraints(space, u, alpha, false);
  double c_scale = 0.0;
  for (const LevelConstraints& level : alpha_system.levels)
    for (const PairConstraint& e : level.pairs) c_scale = std::max(c_scale, e.c);

  // v) Besov downgrade from alpha+sigma, q = inf, into the finite exponent r.
  {
    const NormResult fine = min_gradient_besov(space, u, alpha + sigma, p, kInf, opts);
    GradientSequence h;
    std::vector<double> level_norms;
    for (const LevelConstraints& level : alpha_system.levels) {
      const int k = level.level;
      std::vector<double> row(space.size(), 0.0);
      if (k >= 0) {
        const auto it =
            std::find(fine.gradient.levels.begin(), fine.gradient.levels.end(), k);
        if (it != fine.gradient.levels.end()) {
          const std::vector<double>& fine_row =
              fine.gradient.values[static_cast<std::size_t>(it - fine.gradient.levels.begin())];
          const double factor = std::pow(2.0, -k * sigma);
          for (std::size_t i = 0; i < row.size(); ++i) row[i] = factor * fine_row[i];
        }
      } else {
        const double factor = std::pow(2.0, (k + 1) * alpha);
        for (std::size_t i = 0; i < row.size(); ++i) row[i] = factor * std::abs(u[i]);
      }
      h.levels.push_back(k);
      h.values.push_back(std::move(row));
      level_norms.push_back(lp_norm(space, h.values.back(), p));
    }
    checks.v_feasible = gradient_violation(space, u, h, alpha) <= 1e-9 * (1.0 + c_scale);
    checks.v_h_norm = lq_combine(level_norms, r);
    const double g_sup = fine.seminorm;
    checks.v_rhs = std::pow(std::pow(g_sup, r) / (1.0 - std::pow(2.0, -r * sigma)) +
                                std::pow(lp, r) / (1.0 - std::pow(2.0, -r * alpha)),
                            1.0 / r);
    const NormResult lhs = min_gradient_besov(space, u, alpha, p, r, opts);
    checks.v_lhs = lhs.seminorm;
    checks.v_holds = checks.v_feasible &&
                     checks.v_lhs <= checks.v_h_norm * (1.0 + slack) + slack &&
                     checks.v_h_norm <= checks.v_rhs * (1.0 + slack) + slack;
  }

  // vi) Single-gradient downgrade into the level-binned l^r-inside form.
  {
    const NormResult fine = min_gradient_sobolev(space, u, alpha + sigma, p, opts);
    const std::vector<double>& g_star = fine.gradient.values.front();
    GradientSequence h;
    for (const LevelConstraints& level : alpha_system.levels) {
      const int k = level.level;
      std::vector<double> row(space.size(), 0.0);
      if (k >= 0) {
        const double factor = std::pow(2.0, -k * sigma);
        for (std::size_t i = 0; i < row.size(); ++i) row[i] = factor * g_star[i];
      } else {
        const double factor = std::pow(2.0, (k + 1) * alpha);
        for (std::size_t i = 0; i < row.size(); ++i) row[i] = factor * std::abs(u[i]);
      }
      h.levels.push_back(k);
      h.values.push_back(std::move(row));
    }
    checks.vi_feasible = gradient_violation(space, u, h, alpha) <= 1e-9 * (1.0 + c_scale);
    std::vector<double> column(h.values.size());
    std::vector<double> pointwise(space.size(), 0.0);
    for (std::size_t i = 0; i < space.size(); ++i) {
      for (std::size_t k = 0; k < h.values.size(); ++k) column[k] = h.values[k][i];
      pointwise[i] = lq_combine(column, r);
    }
    checks.vi_h_norm = lp_norm(space, pointwise, p);
    checks.vi_rhs =
        std::pow(2.0, 1.0 / r) *
        std::pow(std::pow(fine.seminorm, p) /
                     std::pow(1.0 - std::pow(2.0, -r * sigma), p / r) +
                 std::pow(lp, p) / std::pow(1.0 - std::pow(2.0, -r * alpha), p / r),
                 1.0 / p);
    const NormResult lhs = min_gradient_tl(space, u, alpha, p, r, opts);
    checks.vi_lhs = lhs.seminorm;
    checks.vi_holds = checks.vi_feasible &&
                      checks.vi_lhs <= checks.vi_h_norm * (1.0 + slack) + slack &&
                      checks.vi_h_norm <= checks.vi_rhs * (1.0 + slack) + slack;
  }
  return checks;
}

// ---------------------------------------------------------------------------
// Bump and downgrade
// ---------------------------------------------------------------------------

BumpResult bump(const FiniteQMMSpace& space, const std::vector<std::size_t>& e0,
                const std::vector<std::size_t>& e1, double beta, double alpha, double p,
                double q, const SolveOptions& opts) {
  if (e0.empty() || e1.empty()) fail(ValidationError::Kind::EmptySet, "bump: empty set");
  check_alpha(alpha);
  check_exponent_p(p);
  check_exponent_q(q);
  if (!(beta > 0.0) || !(alpha <= beta))
    fail(ValidationError::Kind::BadExponents, "bump: need 0 < alpha <= beta");
  for (std::size_t x : e0)
    for (std::size_t y : e1)
      if (x == y) fail(ValidationError::Kind::TouchingSets, "bump: the two sets intersect");

  const ChainMetricResult chain = chain_metric(space, beta);
  const std::size_t n = space.size();
  auto sigma_at = [&](std::size_t i, std::size_t j) { return chain.sigma[i * n + j]; };

  BumpResult result;
  result.beta = beta;
  result.alpha = alpha;
  result.p = p;
  result.q = q;
  double dist_sigma = kInf;
  for (std::size_t x : e0)
    for (std::size_t y : e1) dist_sigma = std::min(dist_sigma, sigma_at(x, y));
  result.dist_sigma = dist_sigma;
  result.holder_bound = 1.0 / dist_sigma;

  result.phi.assign(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double to_e0 = kInf;
    for (std::size_t y : e0) to_e0 = std::min(to_e0, sigma_at(x, y));
    result.phi[x] = std::min(1.0, to_e0 / dist_sigma);
  }
  double measured = 0.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      const double dphi = std::abs(result.phi[x] - result.phi[y]);
      if (dphi > 0.0) measured = std::max(measured, dphi / sigma_at(x, y));
    }
  result.holder_measured = measured;

  result.dist_d = dist_between_sets(space, e0, e1);
  std::vector<char> in_e0(n, 0);
  for (std::size_t x : e0) in_e0[x] = 1;
  for (std::size_t x = 0; x < n; ++x)
    if (!in_e0[x]) result.mass_off_e0 += space.mu(x);
  result.shape = std::pow(result.dist_d, -alpha) * std::pow(result.mass_off_e0, 1.0 / p);

  result.norm_tl = min_gradient_tl(space, result.phi, alpha, p, q, opts);
  result.norm_besov = min_gradient_besov(space, result.phi, alpha, p, q, opts);
  result.ratio_tl = result.norm_tl.seminorm / result.shape;
  result.ratio_besov = result.norm_besov.seminorm / result.shape;
  return result;
}

DowngradeResult downgrade_gradient(const FiniteQMMSpace& space, const std::vector<double>& u,
                                   const GradientSequence& g, double alpha, double beta,
                                   double eps) {
  check_alpha(alpha);
  if (!(beta > 0.0) || !(beta < alpha))
    fail(ValidationError::Kind::BadExponents, "downgrade: need 0 < beta < alpha");
  if (!(eps > 0.0 && eps <= 1.0))
    fail(ValidationError::Kind::InvalidParams, "downgrade: eps must lie in (0, 1]");
  const ConstraintSystem alpha_system = build_constraints(space, u, alpha, false);
  const double scale = [&] {
    double s = 0.0;
    for (const LevelConstraints& level : alpha_system.levels)
      for (const PairConstraint& e : level.pairs) s = std::max(s, e.c);
    return s;
  }();
  if (gradient_violation(space, u, g, alpha) > 1e-9 * (1.0 + scale))
    fail(ValidationError::Kind::InfeasibleInput,
         "downgrade: the input gradient sequence is infeasible at alpha");

  // K is determined by 2^{-K} <= eps < 2^{-K+1}.
  int K = static_cast<int>(std::ceil(-std::log2(eps)));
  while (eps >= std::ldexp(1.0, -K + 1)) --K;
  while (eps < std::ldexp(1.0, -K)) ++K;

  DowngradeResult out;
  out.K = K;
  out.eps = eps;
  const double eps_pow = std::pow(eps, alpha - beta);
  for (const LevelConstraints& level : alpha_system.levels) {
    const int k = level.level;
    std::vector<double> row(space.size(), 0.0);
    if (k >= K) {
      const auto it = std::find(g.levels.begin(), g.levels.end(), k);
      if (it == g.levels.end())
        fail(ValidationError::Kind::InfeasibleInput,
             "downgrade: the input gradient sequence is missing a required level");
      const std::vector<double>& src = g.values[static_cast<std::size_t>(it - g.levels.begin())];
      for (std::size_t i = 0; i < row.size(); ++i) row[i] = eps_pow * src[i];
    } else {
      const double factor = std::pow(2.0, beta) * std::pow(2.0, k * beta);
      for (std::size_t i = 0; i < row.size(); ++i) row[i] = factor * std::abs(u[i]);
    }
    out.h.levels.push_back(k);
    out.h.values.push_back(std::move(row));
  }
  out.feasible = gradient_violation(space, u, out.h, beta) <= 1e-9 * (1.0 + scale);
  return out;
}

}  // namespace qmms
