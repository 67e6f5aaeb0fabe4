#include "qmms/compactness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qmms/geometry.hpp"
#include "qmms/regularize.hpp"

namespace qmms {

namespace {

void check_members(const FiniteQMMSpace& space, const std::vector<std::vector<double>>& members) {
  if (members.empty())
    fail(ValidationError::Kind::EmptySet, "family must contain at least one member");
  for (const std::vector<double>& u : members) validate_function(space, u);
}

double max_constraint_scale(const FiniteQMMSpace& space, const std::vector<double>& u,
                            double alpha) {
  const ConstraintSystem system = build_constraints(space, u, alpha, true);
  double scale = 0.0;
  for (const LevelConstraints& level : system.levels)
    for (const PairConstraint& e : level.pairs) scale = std::max(scale, e.c);
  return scale;
}

}  // namespace

double l0_distance(const FiniteQMMSpace& space, const std::vector<double>& f,
                   const std::vector<double>& g) {
  validate_function(space, f);
  validate_function(space, g);
  double total = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double diff = std::abs(f[i] - g[i]);
    total += space.mu(i) * diff / (1.0 + diff);
  }
  return total;
}

ExceptionalSetsResult sobolev_exceptional_sets(const FiniteQMMSpace& space,
                                               const std::vector<std::vector<double>>& members,
                                               const std::vector<std::vector<double>>& gradients,
                                               double alpha, double p, double eps, double eta) {
  check_members(space, members);
  if (gradients.size() != members.size())
    fail(ValidationError::Kind::MissingGradient,
         "one upper gradient per family member is required");
  if (!(eps > 0.0) || !(eta > 0.0))
    fail(ValidationError::Kind::InvalidParams, "eps and eta must be positive");
  if (!(p > 0.0) || p == kInf)
    fail(ValidationError::Kind::BadExponents, "p must lie in (0, inf)");

  ExceptionalSetsResult out;
  out.eps = eps;
  out.eta = eta;
  const std::size_t n = space.size();
  for (std::size_t m = 0; m < members.size(); ++m) {
    validate_function(space, gradients[m]);
    for (double v : gradients[m])
      if (v < 0.0)
        fail(ValidationError::Kind::InfeasibleGradient, "upper gradients must be nonnegative");
    const double scale = max_constraint_scale(space, members[m], alpha);
    if (gradient_violation_single(space, members[m], gradients[m], alpha) >
        1e-9 * (1.0 + scale))
      fail(ValidationError::Kind::InfeasibleGradient,
           "a supplied gradient is infeasible for its member");
    out.family_bound = std::max(out.family_bound, lp_norm(space, members[m], p) +
                                                      lp_norm(space, gradients[m], p));
  }
  out.lambda = out.family_bound * std::pow(2.0, 2.0 + 1.0 / p) / std::pow(eta, 1.0 / p);
  out.delta = out.lambda > 0.0 ? std::pow(eps / (2.0 * out.lambda), 1.0 / alpha) : kInf;
  out.uniform_small = true;
  for (std::size_t m = 0; m < members.size(); ++m) {
    std::vector<char> flag(n, 0);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::max(std::abs(members[m][i]), gradients[m][i]) > out.lambda) {
        flag[i] = 1;
        mass += space.mu(i);
      }
    }
    out.exceptional.push_back(std::move(flag));
    out.exceptional_mass.push_back(mass);
    if (!(mass < eta)) out.uniform_small = false;
  }
  return out;
}

FrechetResult frechet_certify(const FiniteQMMSpace& space,
                              const std::vector<std::vector<double>>& members,
                              const std::vector<std::vector<double>>& gradients, double alpha,
                              double p, double eps, const FrechetOptions& options) {
  if (!(eps > 0.0)) fail(ValidationError::Kind::InvalidParams, "eps must be positive");
  FrechetResult out;
  out.eps = eps;
  out.delta_f = eps / (1.0 + 2.0 * space.total_mass());

  const ExceptionalSetsResult exc =
      sobolev_exceptional_sets(space, members, gradients, alpha, p, out.delta_f, out.delta_f);
  out.lambda = exc.lambda;
  out.delta = exc.delta;
  if (!exc.uniform_small) {
    out.obstruction = "exceptional_mass";
    out.obstruction_value =
        *std::max_element(exc.exceptional_mass.begin(), exc.exceptional_mass.end());
    return out;
  }

  // Cells: a greedy maximal separated set in the symmetric chain metric, with
  // radius chosen so that in-cell oscillation of the base quasi-metric stays
  // below the oscillation scale delta.
  const std::size_t n = space.size();
  const ChainMetricResult chain = chain_metric(space, 1.0);
  auto rho_at = [&](std::size_t i, std::size_t j) { return chain.rho[i * n + j]; };
  out.kappa1 = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) out.kappa1 = std::max(out.kappa1, space.dist(i, j) / rho_at(i, j));
  const FiniteQMMSpace rho_space = make_space(chain.rho, space.weights());
  out.c_rho = rho_space.quasi_triangle_constant();
  out.cell_radius = std::isfinite(out.delta) ? out.delta / (out.kappa1 * out.c_rho)
                                             : 2.0 * (rho_space.diameter() + 1.0);

  std::vector<std::size_t> centers;
  for (std::size_t x = 0; x < n; ++x) {
    bool keep = true;
    for (std::size_t c : centers)
      if (rho_at(c, x) < out.cell_radius) {
        keep = false;
        break;
      }
    if (keep) centers.push_back(x);
    if (centers.size() > options.cell_budget) {
      out.obstruction = "cell_budget";
      out.obstruction_value = static_cast<double>(centers.size());
      return out;
    }
  }
  std::vector<std::size_t> owner(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    double best = kInf;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = rho_at(centers[c], x);
      if (d < best) {
        best = d;
        owner[x] = c;
      }
    }
  }
  out.cells.resize(centers.size());
  for (std::size_t c = 0; c < centers.size(); ++c) out.cells[c].center = centers[c];
  for (std::size_t x = 0; x < n; ++x) out.cells[owner[x]].members.push_back(x);

  const double levels_needed = out.lambda / out.delta_f;
  if (levels_needed > 1e12) {
    out.obstruction = "quantization_budget";
    out.obstruction_value = levels_needed;
    return out;
  }
  out.quantization_levels = static_cast<std::size_t>(std::ceil(levels_needed));
  out.net_size_log10 = static_cast<double>(out.cells.size()) *
                       std::log10(2.0 * static_cast<double>(out.quantization_levels) + 1.0);

  const double m_cap = static_cast<double>(out.quantization_levels);
  for (std::size_t m = 0; m < members.size(); ++m) {
    std::vector<double> quantized(n, 0.0);
    for (const FrechetCell& cell : out.cells) {
      double level = 0.0;
      bool found = false;
      double lo = kInf, hi = -kInf;
      for (std::size_t x : cell.members) {
        if (exc.exceptional[m][x]) continue;
        if (!found) {
          level = std::clamp(std::floor(members[m][x] / out.delta_f), -m_cap, m_cap);
          found = true;
        }
        lo = std::min(lo, members[m][x]);
        hi = std::max(hi, members[m][x]);
      }
      if (found && hi - lo > out.worst_cell_oscillation)
        out.worst_cell_oscillation = hi - lo;
      for (std::size_t x : cell.members) quantized[x] = out.delta_f * level;
    }
    out.member_errors.push_back(l0_distance(space, members[m], quantized));
  }
  if (out.worst_cell_oscillation >= out.delta_f * (1.0 + 1e-9)) {
    out.obstruction = "cell_oscillation";
    out.obstruction_value = out.worst_cell_oscillation;
    return out;
  }
  const double worst_error =
      *std::max_element(out.member_errors.begin(), out.member_errors.end());
  if (!(worst_error < eps)) {
    out.obstruction = "net_distance";
    out.obstruction_value = worst_error;
    return out;
  }
  out.certified = true;
  return out;
}

EquiIntegrabilityResult equi_integrability_modulus(const FiniteQMMSpace& space,
                                                   const std::vector<double>& f, double p,
                                                   double delta) {
  validate_function(space, f);
  if (!(p > 0.0) || p == kInf)
    fail(ValidationError::Kind::BadExponents, "p must lie in (0, inf)");
  if (!(delta >= 0.0)) fail(ValidationError::Kind::InvalidParams, "delta must be nonnegative");
  EquiIntegrabilityResult out;
  out.delta = delta;
  const std::size_t n = space.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) density[i] = pow_nn(std::abs(f[i]), p);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return density[a] > density[b]; });
  double budget = delta;
  bool fractional_done = false;
  for (std::size_t i : order) {
    const double m = space.mu(i);
    if (m <= budget) {
      // Fits entirely: contributes to both the achievable value and the bound.
      out.modulus_lower += m * density[i];
      out.modulus_upper += m * density[i];
      budget -= m;
    } else if (!fractional_done) {
      out.modulus_upper += budget * density[i];
      fractional_done = true;
    }
  }
  out.modulus_upper = std::max(out.modulus_upper, out.modulus_lower);
  return out;
}

namespace {

/// Shared machinery for the two bump witnesses: the minimal Holder bump that
/// vanishes on e0 and equals one on e1, measured in the chain metric, together
/// with the height of an explicit feasible gradient supported where the bump
/// can vary.
struct HolderBump {
  std::vector<double> phi;
  double dist_sigma = 0.0;
  double holder_height = 0.0;  ///< H' with |phi(x)-phi(y)| <= H' d(x,y)^alpha
};

HolderBump build_holder_bump(const FiniteQMMSpace& space, const ChainMetricResult& chain,
                             const std::vector<char>& in_e0, const std::vector<char>& in_e1,
                             double alpha, double beta) {
  const std::size_t n = space.size();
  auto sigma_at = [&](std::size_t i, std::size_t j) { return chain.sigma[i * n + j]; };
  HolderBump bump;
  double dist_sigma = kInf;
  for (std::size_t x = 0; x < n; ++x) {
    if (!in_e0[x]) continue;
    for (std::size_t y = 0; y < n; ++y)
      if (in_e1[y]) dist_sigma = std::min(dist_sigma, sigma_at(x, y));
  }
  bump.dist_sigma = dist_sigma;
  bump.phi.assign(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double to_e0 = kInf;
    for (std::size_t y = 0; y < n; ++y)
      if (in_e0[y]) to_e0 = std::min(to_e0, sigma_at(x, y));
    bump.phi[x] = std::min(1.0, to_e0 / dist_sigma);
  }
  // sigma <= (cd_tilde * d)^beta pairwise, so the bump obeys
  // |dPhi| <= cd_tilde^beta d^{beta-alpha} / dist_sigma * d^alpha.
  double max_pow = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) max_pow = std::max(max_pow, std::pow(space.dist(i, j), beta - alpha));
  bump.holder_height =
      std::pow(space.symmetry_constant(), beta) * max_pow / dist_sigma;
  return bump;
}

}  // namespace

BumpWitnessResult separated_bump_witness(const FiniteQMMSpace& space, double delta, double alpha,
                                         double p, double beta, const SolveOptions& opts,
                                         bool solve_norms) {
  if (!(delta > 0.0)) fail(ValidationError::Kind::InvalidParams, "delta must be positive");
  if (!(alpha > 0.0) || !(alpha <= beta))
    fail(ValidationError::Kind::BadExponents, "need 0 < alpha <= beta");
  if (!(p > 0.0) || p == kInf)
    fail(ValidationError::Kind::BadExponents, "p must lie in (0, inf)");

  BumpWitnessResult out;
  out.delta = delta;
  const double cd = space.quasi_triangle_constant();
  const double cdt = space.symmetry_constant();
  out.separation = cdt * cd * cd * delta;
  const std::size_t n = space.size();

  for (std::size_t x = 0; x < n; ++x) {
    bool keep = true;
    for (std::size_t c : out.centers)
      if (std::min(space.dist(c, x), space.dist(x, c)) < out.separation) {
        keep = false;
        break;
      }
    if (keep) out.centers.push_back(x);
  }
  if (out.centers.size() < 2)
    fail(ValidationError::Kind::NoSeparatedPair,
         "no pair of centers is separated at the required scale");

  std::vector<std::vector<std::size_t>> small_balls, big_balls;
  for (std::size_t c : out.centers) {
    small_balls.push_back(ball(space, c, delta).members);
    big_balls.push_back(ball(space, c, cd * delta).members);
  }
  out.balls_disjoint = true;
  for (std::size_t k = 0; k < out.centers.size() && out.balls_disjoint; ++k)
    for (std::size_t l = 0; l < out.centers.size() && out.balls_disjoint; ++l) {
      if (k == l) continue;
      std::vector<std::size_t> common;
      std::set_intersection(small_balls[k].begin(), small_balls[k].end(), big_balls[l].begin(),
                            big_balls[l].end(), std::back_inserter(common));
      if (!common.empty()) out.balls_disjoint = false;
    }

  const ChainMetricResult chain = chain_metric(space, beta);
  for (std::size_t j = 0; j < out.centers.size(); ++j) {
    std::vector<char> in_e0(n, 1), in_e1(n, 0);
    for (std::size_t x : big_balls[j]) in_e0[x] = 0;
    for (std::size_t x : small_balls[j]) in_e1[x] = 1;
    const HolderBump hb = build_holder_bump(space, chain, in_e0, in_e1, alpha, beta);
    double small_mass = 0.0, big_mass = 0.0;
    for (std::size_t x : small_balls[j]) small_mass += space.mu(x);
    for (std::size_t x : big_balls[j]) big_mass += space.mu(x);
    const double norm_factor = std::pow(small_mass, 1.0 / p);
    std::vector<double> f(n);
    for (std::size_t x = 0; x < n; ++x) f[x] = hb.phi[x] / norm_factor;
    out.functions.push_back(std::move(f));
    out.holder_constants.push_back(hb.holder_height);
    const double phi_lp = lp_norm(space, hb.phi, p);
    out.norm_bounds.push_back(
        (phi_lp + hb.holder_height * std::pow(big_mass, 1.0 / p)) / norm_factor);
  }

  out.min_gap_p = kInf;
  std::vector<double> diff(n);
  for (std::size_t k = 0; k < out.functions.size(); ++k)
    for (std::size_t l = k + 1; l < out.functions.size(); ++l) {
      double gap = 0.0;
      for (std::size_t x = 0; x < n; ++x)
        gap += space.mu(x) * pow_nn(std::abs(out.functions[k][x] - out.functions[l][x]), p);
      out.min_gap_p = std::min(out.min_gap_p, gap);
    }
  out.gap_at_least_two = out.min_gap_p >= 2.0 * (1.0 - 1e-9);
  out.doubling_delta = doubling_constant(space, cd, delta);

  if (solve_norms)
    for (const std::vector<double>& f : out.functions)
      out.solved_norms.push_back(min_gradient_sobolev(space, f, alpha, p, opts).full_norm);
  return out;
}

TailWitnessResult tail_bump_witness(const FiniteQMMSpace& space, std::size_t x0,
                                    const std::vector<double>& radii, double alpha, double p,
                                    double beta, const SolveOptions& opts, bool solve_norms) {
  if (x0 >= space.size()) fail(ValidationError::Kind::BadIndex, "x0 out of range");
  if (radii.empty()) fail(ValidationError::Kind::InvalidParams, "need at least one radius");
  if (!(alpha > 0.0) || !(alpha <= beta))
    fail(ValidationError::Kind::BadExponents, "need 0 < alpha <= beta");
  if (!(p > 0.0) || p == kInf)
    fail(ValidationError::Kind::BadExponents, "p must lie in (0, inf)");

  TailWitnessResult out;
  out.x0 = x0;
  out.radii = radii;
  std::sort(out.radii.begin(), out.radii.end());
  for (double r : out.radii)
    if (!(r >= 1.0))
      fail(ValidationError::Kind::InvalidParams, "tail radii must be at least 1");

  const double cd = space.quasi_triangle_constant();
  const std::size_t n = space.size();
  const ChainMetricResult chain = chain_metric(space, beta);
  const double total = space.total_mass();

  for (double R : out.radii) {
    const std::vector<std::size_t> inner = ball(space, x0, R).members;
    const std::vector<std::size_t> big = ball(space, x0, cd * R).members;
    double inner_mass = 0.0, big_mass = 0.0;
    for (std::size_t x : inner) inner_mass += space.mu(x);
    for (std::size_t x : big) big_mass += space.mu(x);
    const double small_tail = total - inner_mass;
    const double big_tail = total - big_mass;
    if (!(big_tail > 0.0))
      fail(ValidationError::Kind::TailEmpty, "no mass beyond the dilated ball");
    out.tail_small.push_back(small_tail);
    out.tail_big.push_back(big_tail);
    out.ratios.push_back(small_tail / big_tail);

    std::vector<char> in_e0(n, 0), in_e1(n, 1);
    for (std::size_t x : inner) in_e0[x] = 1;
    for (std::size_t x : big) in_e1[x] = 0;
    const HolderBump hb = build_holder_bump(space, chain, in_e0, in_e1, alpha, beta);
    const double norm_factor = std::pow(big_tail, 1.0 / p);
    std::vector<double> f(n);
    for (std::size_t x = 0; x < n; ++x) f[x] = hb.phi[x] / norm_factor;
    double far_mass = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      if (in_e1[x]) far_mass += space.mu(x) * pow_nn(std::abs(f[x]), p);
    out.unit_masses.push_back(far_mass);
    out.holder_constants.push_back(hb.holder_height);
    const double phi_lp = lp_norm(space, hb.phi, p);
    out.norm_bounds.push_back(
        (phi_lp + hb.holder_height * std::pow(small_tail, 1.0 / p)) / norm_factor);
    out.functions.push_back(std::move(f));
  }

  out.equi_delta = out.tail_big.back();
  out.modulus_at_delta =
      equi_integrability_modulus(space, out.functions.back(), p, out.equi_delta).modulus_lower;
  out.not_equi_integrable = out.modulus_at_delta >= 1.0 - 1e-9;

  if (solve_norms)
    for (const std::vector<double>& f : out.functions)
      out.solved_norms.push_back(min_gradient_sobolev(space, f, alpha, p, opts).full_norm);
  return out;
}

KeyInequalityResult key_inequality_check(const FiniteQMMSpace& space,
                                         const std::vector<double>& u,
                                         const std::vector<double>& g,
                                         const std::vector<double>& nu,
                                         const std::vector<std::size_t>& d_set, double r,
                                         double alpha, double p) {
  validate_function(space, u);
  validate_function(space, g);
  validate_function(space, nu);
  if (!(r > 0.0)) fail(ValidationError::Kind::InvalidParams, "r must be positive");
  if (!(alpha > 0.0))
    fail(ValidationError::Kind::BadExponents, "alpha must be positive");
  if (!(p > 0.0) || p == kInf)
    fail(ValidationError::Kind::BadExponents, "p must lie in (0, inf)");
  for (double v : nu)
    if (v < 0.0)
      fail(ValidationError::Kind::NonpositiveWeight, "nu must be nonnegative");
  for (double v : g)
    if (v < 0.0)
      fail(ValidationError::Kind::InfeasibleGradient, "gradient must be nonnegative");
  const double scale = max_constraint_scale(space, u, alpha);
  if (gradient_violation_single(space, u, g, alpha) > 1e-9 * (1.0 + scale))
    fail(ValidationError::Kind::InfeasibleGradient, "gradient is infeasible for u");

  const std::size_t n = space.size();
  std::vector<char> in_d(n, 0);
  for (std::size_t x : d_set) {
    if (x >= n) fail(ValidationError::Kind::BadIndex, "d_set index out of range");
    in_d[x] = 1;
  }
  auto rho_at = [&](std::size_t i, std::size_t j) {
    return std::max(space.dist(i, j), space.dist(j, i));
  };
  KeyInequalityResult out;
  out.r = r;
  out.kappa = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) out.kappa = std::max(out.kappa, rho_at(i, j) / space.dist(i, j));

  std::vector<double> ball_mass_rho(n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t z = 0; z < n; ++z)
      if (rho_at(x, z) < r) ball_mass_rho[x] += space.mu(z);

  const double amp = std::pow(4.0, p) * std::pow(out.kappa, alpha * p) * std::pow(r, alpha * p);
  double lhs = 0.0, grad_all = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    if (in_d[x]) lhs += nu[x] * pow_nn(std::abs(u[x]), p);
    grad_all += nu[x] * pow_nn(g[x], p);
  }
  out.lhs = lhs;
  out.rhs_gradient_term = amp * grad_all;
  double window = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    double t = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      if (in_d[x] && rho_at(y, x) < r) t += nu[x] / ball_mass_rho[x];
    if (t == 0.0) continue;
    window +=
        space.mu(y) * (amp * pow_nn(g[y], p) + std::pow(2.0, p) * pow_nn(std::abs(u[y]), p)) * t;
  }
  out.rhs_window_term = window;
  out.rhs = out.rhs_gradient_term + out.rhs_window_term;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9) + 1e-300;
  return out;
}

InterpolationResult interpolation_check(const FiniteQMMSpace& space, const std::vector<double>& f,
                                        double p, double p_tilde, double p_star) {
  if (!(p > 0.0) || !(p < p_tilde) || !(p_tilde < p_star))
    fail(ValidationError::Kind::BadExponents, "need 0 < p < p_tilde < p_star");
  InterpolationResult out;
  out.p = p;
  out.p_tilde = p_tilde;
  out.p_star = p_star;
  const double inv_star = p_star == kInf ? 0.0 : 1.0 / p_star;
  out.theta = (1.0 / p_tilde - inv_star) / (1.0 / p - inv_star);
  out.lhs = lp_norm(space, f, p_tilde);
  const double np = lp_norm(space, f, p);
  const double ns = lp_norm(space, f, p_star);
  out.rhs = std::pow(np, out.theta) * std::pow(ns, 1.0 - out.theta);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12) + 1e-300;
  return out;
}

HolderLpResult holder_lp_check(const FiniteQMMSpace& space, const std::vector<double>& f,
                               double p_tilde, double p) {
  if (!(p_tilde > 0.0) || !(p_tilde < p) || p == kInf)
    fail(ValidationError::Kind::BadExponents, "need 0 < p_tilde < p < inf");
  HolderLpResult out;
  out.p = p;
  out.p_tilde = p_tilde;
  out.factor = std::pow(space.total_mass(), 1.0 / p_tilde - 1.0 / p);
  out.lhs = lp_norm(space, f, p_tilde);
  out.rhs = out.factor * lp_norm(space, f, p);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12) + 1e-300;
  return out;
}

}  // namespace qmms
