#include "qmms/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace qmms {

namespace {

constexpr double kPivotTol = 1e-11;

/// Row-reduces the augmented system M g = rhs (M is rows x n) and returns a
/// particular solution plus a null-space basis, or false when inconsistent.
bool affine_solve(std::vector<std::vector<double>> M, std::vector<double> rhs, std::size_t n,
                  std::vector<double>& particular, std::vector<std::vector<double>>& null_basis) {
  const std::size_t rows = M.size();
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < rows; ++col) {
    std::size_t best = rank;
    for (std::size_t r = rank + 1; r < rows; ++r)
      if (std::abs(M[r][col]) > std::abs(M[best][col])) best = r;
    if (std::abs(M[best][col]) <= kPivotTol) continue;
    std::swap(M[rank], M[best]);
    std::swap(rhs[rank], rhs[best]);
    const double inv = 1.0 / M[rank][col];
    for (std::size_t c = 0; c < n; ++c) M[rank][c] *= inv;
    rhs[rank] *= inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank) continue;
      const double f = M[r][col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) M[r][c] -= f * M[rank][c];
      rhs[r] -= f * rhs[rank];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  for (std::size_t r = rank; r < rows; ++r)
    if (std::abs(rhs[r]) > 1e-9) return false;

  std::vector<char> is_pivot(n, 0);
  for (std::size_t c : pivot_col) is_pivot[c] = 1;
  particular.assign(n, 0.0);
  for (std::size_t r = 0; r < rank; ++r) particular[pivot_col[r]] = rhs[r];
  null_basis.clear();
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    std::vector<double> v(n, 0.0);
    v[free] = 1.0;
    for (std::size_t r = 0; r < rank; ++r) v[pivot_col[r]] = -M[r][free];
    null_basis.push_back(std::move(v));
  }
  return true;
}

double signed_power_objective(const std::vector<double>& w, double p,
                              const std::vector<double>& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += w[i] * std::pow(std::abs(g[i]), p);
  return s;
}

/// Armijo gradient descent for the smooth convex F(z) = sum w |g0 + Nz|^p.
std::vector<double> descend(const std::vector<double>& w, double p,
                            const std::vector<double>& g0,
                            const std::vector<std::vector<double>>& N) {
  const std::size_t n = g0.size();
  const std::size_t dim = N.size();
  std::vector<double> z(dim, 0.0), g = g0, grad(dim, 0.0);
  double value = signed_power_objective(w, p, g);
  double step = 1.0;
  for (int iter = 0; iter < 4000; ++iter) {
    for (std::size_t k = 0; k < dim; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        s += w[i] * p * std::pow(std::abs(gi), p - 1.0) * (gi > 0.0 ? 1.0 : -1.0) * N[k][i];
      }
      grad[k] = s;
    }
    double gn2 = 0.0;
    for (double v : grad) gn2 += v * v;
    if (gn2 <= 1e-24 * (1.0 + value * value)) break;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      std::vector<double> z_try(dim), g_try(n);
      for (std::size_t k = 0; k < dim; ++k) z_try[k] = z[k] - step * grad[k];
      g_try = g0;
      for (std::size_t k = 0; k < dim; ++k)
        for (std::size_t i = 0; i < n; ++i) g_try[i] += z_try[k] * N[k][i];
      const double v_try = signed_power_objective(w, p, g_try);
      if (v_try <= value - 1e-4 * step * gn2) {
        z = std::move(z_try);
        g = std::move(g_try);
        value = v_try;
        moved = true;
        step *= 1.3;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return g;
}

bool feasible_candidate(const std::vector<PairConstraint>& pairs, std::vector<double>& g,
                        double scale) {
  for (double& v : g) {
    if (v < -1e-9 * scale) return false;
    v = std::max(v, 0.0);
  }
  for (const PairConstraint& e : pairs)
    if (g[e.i] + g[e.j] < e.c - 1e-7 * scale) return false;
  return true;
}

/// p = 1: vertex enumeration for the linear program.
OracleResult oracle_linear(std::size_t n, const std::vector<double>& w,
                           const std::vector<PairConstraint>& pairs, double scale) {
  const std::size_t m = pairs.size();
  // Rows: m pair constraints then n nonnegativity bounds.  Enumerate all
  // n-subsets of rows via a simple odometer; each nonsingular subset is a
  // basic solution, and the optimum of the linear program sits at one of them.
  OracleResult best;
  best.objective = kInf;
  std::vector<std::size_t> comb(n);
  for (std::size_t i = 0; i < n; ++i) comb[i] = i;
  const std::size_t total = m + n;
  while (true) {
    std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
    std::vector<double> rhs(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t row = comb[r];
      if (row < m) {
        M[r][pairs[row].i] = 1.0;
        M[r][pairs[row].j] = 1.0;
        rhs[r] = pairs[row].c;
      } else {
        M[r][row - m] = 1.0;
      }
    }
    std::vector<double> g;
    std::vector<std::vector<double>> null_basis;
    if (affine_solve(M, rhs, n, g, null_basis) && null_basis.empty()) {
      std::vector<double> cand = g;
      if (feasible_candidate(pairs, cand, scale)) {
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) obj += w[i] * cand[i];
        if (obj < best.objective) {
          best.objective = obj;
          best.gradient = cand;
        }
      }
    }
    // Next combination.
    std::size_t k = n;
    while (k > 0 && comb[k - 1] == total - n + (k - 1)) --k;
    if (k == 0) break;
    ++comb[k - 1];
    for (std::size_t j = k; j < n; ++j) comb[j] = comb[j - 1] + 1;
  }
  return best;
}

/// p > 1: exhaustive active-set enumeration.  For the optimal pair
/// (tight constraints S, zero variables Z) the unconstrained minimizer of the
/// smooth strictly convex objective over the affine set {A_S g = c_S, g_Z = 0}
/// coincides with the true optimum, so scanning every (S, Z) and filtering by
/// feasibility recovers it exactly.
OracleResult oracle_smooth(std::size_t n, const std::vector<double>& w, double p,
                           const std::vector<PairConstraint>& pairs, double scale) {
  const std::size_t m = pairs.size();
  OracleResult best;
  best.objective = kInf;
  for (std::size_t smask = 0; smask < (std::size_t{1} << m); ++smask) {
    for (std::size_t zmask = 0; zmask < (std::size_t{1} << n); ++zmask) {
      std::vector<std::vector<double>> M;
      std::vector<double> rhs;
      for (std::size_t e = 0; e < m; ++e) {
        if (!(smask >> e & 1)) continue;
        std::vector<double> row(n, 0.0);
        row[pairs[e].i] = 1.0;
        row[pairs[e].j] = 1.0;
        M.push_back(std::move(row));
        rhs.push_back(pairs[e].c);
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!(zmask >> i & 1)) continue;
        std::vector<double> row(n, 0.0);
        row[i] = 1.0;
        M.push_back(std::move(row));
        rhs.push_back(0.0);
      }
      std::vector<double> g0;
      std::vector<std::vector<double>> null_basis;
      if (M.empty()) {
        g0.assign(n, 0.0);
        null_basis.assign(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) null_basis[i][i] = 1.0;
      } else if (!affine_solve(M, rhs, n, g0, null_basis)) {
        continue;
      }
      std::vector<double> cand =
          null_basis.empty() ? g0 : descend(w, p, g0, null_basis);
      if (!feasible_candidate(pairs, cand, scale)) continue;
      const double obj = signed_power_objective(w, p, cand);
      if (obj < best.objective) {
        best.objective = obj;
        best.gradient = cand;
      }
    }
  }
  return best;
}

}  // namespace

OracleResult oracle_core(std::size_t n, const std::vector<double>& w, double p,
                         const std::vector<PairConstraint>& pairs) {
  if (!(p >= 1.0))
    fail(ValidationError::Kind::BadExponents, "oracle: exponent must be at least 1");
  const std::size_t m = pairs.size();
  const std::size_t n_cap = p == 1.0 ? 6 : 5;
  const std::size_t m_cap = p == 1.0 ? 15 : 10;
  if (n > n_cap || m > m_cap)
    fail(ValidationError::Kind::InvalidParams,
         "oracle: instance too large for exhaustive enumeration");
  OracleResult out;
  if (m == 0) {
    out.gradient.assign(n, 0.0);
    return out;
  }
  double scale = 0.0;
  for (const PairConstraint& e : pairs) scale = std::max(scale, e.c);
  out = p == 1.0 ? oracle_linear(n, w, pairs, scale) : oracle_smooth(n, w, p, pairs, scale);
  if (!std::isfinite(out.objective))
    fail(ValidationError::Kind::SolverDiverged, "oracle: no feasible candidate survived");
  out.seminorm = std::pow(out.objective, 1.0 / p);
  return out;
}

OracleResult oracle_sobolev(const FiniteQMMSpace& space, const std::vector<double>& u,
                            double alpha, double p) {
  const ConstraintSystem system = build_constraints(space, u, alpha, true);
  if (system.levels.empty()) {
    OracleResult out;
    out.gradient.assign(space.size(), 0.0);
    return out;
  }
  return oracle_core(space.size(), space.weights(), p, system.levels.front().pairs);
}

double oracle_besov_seminorm(const FiniteQMMSpace& space, const std::vector<double>& u,
                             double alpha, double p, double q) {
  const ConstraintSystem system = build_constraints(space, u, alpha, false);
  std::vector<double> level_norms;
  for (const LevelConstraints& level : system.levels)
    level_norms.push_back(oracle_core(space.size(), space.weights(), p, level.pairs).seminorm);
  return lq_combine(level_norms, q);
}

double two_point_seminorm(double c, double w1, double w2, double p) {
  if (!(c > 0.0) || !(w1 > 0.0) || !(w2 > 0.0) || !(p > 0.0))
    fail(ValidationError::Kind::InvalidParams, "two_point_seminorm: positive inputs required");
  if (p == 1.0) return std::min(w1, w2) * c;
  if (p < 1.0) return std::pow(std::min(w1, w2), 1.0 / p) * c;
  const double a = std::pow(w1, -1.0 / (p - 1.0));
  const double b = std::pow(w2, -1.0 / (p - 1.0));
  return c * std::pow(a + b, (1.0 - p) / p);
}

}  // namespace qmms
