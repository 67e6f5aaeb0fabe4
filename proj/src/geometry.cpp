#include "qmms/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qmms {

NetResult greedy_separated(const FiniteQMMSpace& space, double epsilon) {
  if (!(epsilon > 0.0)) fail(ValidationError::Kind::InvalidParams, "greedy_separated: epsilon must be positive");
  NetResult net;
  net.epsilon = epsilon;
  net.kind = "maximal_separated";
  net.cover_radius_factor = space.symmetry_constant();
  for (std::size_t x = 0; x < space.size(); ++x) {
    bool keep = true;
    for (std::size_t c : net.centers) {
      if (std::min(space.dist(c, x), space.dist(x, c)) < epsilon) {
        keep = false;
        break;
      }
    }
    if (keep) net.centers.push_back(x);
  }
  return net;
}

FarthestFirst farthest_first(const FiniteQMMSpace& space) {
  const std::size_t n = space.size();
  FarthestFirst out;
  out.order.reserve(n);
  out.radii.reserve(n);
  std::vector<double> dist_to_centers(n, kInf);
  std::size_t next = 0;  // first center is the lowest index
  for (std::size_t m = 0; m < n; ++m) {
    out.order.push_back(next);
    for (std::size_t x = 0; x < n; ++x)
      dist_to_centers[x] = std::min(dist_to_centers[x], space.dist(next, x));
    double far = 0.0;
    std::size_t arg = n;
    for (std::size_t x = 0; x < n; ++x) {
      if (dist_to_centers[x] > far) {  // strict: ties resolve to the lowest index
        far = dist_to_centers[x];
        arg = x;
      }
    }
    out.radii.push_back(far);
    if (arg == n) break;  // everything covered exactly
    next = arg;
  }
  return out;
}

CoveringProfile covering_profile(const FiniteQMMSpace& space, std::vector<double> epsilons) {
  CoveringProfile profile;
  profile.traversal = farthest_first(space);
  std::sort(epsilons.begin(), epsilons.end());
  profile.epsilons = std::move(epsilons);
  for (double eps : profile.epsilons) {
    if (!(eps > 0.0)) fail(ValidationError::Kind::InvalidParams, "covering_profile: epsilon must be positive");
    // Smallest prefix whose covering radius is < eps.
    std::size_t m = profile.traversal.radii.size();
    for (std::size_t i = 0; i < profile.traversal.radii.size(); ++i) {
      if (profile.traversal.radii[i] < eps) {
        m = i + 1;
        break;
      }
    }
    // A full traversal always ends with covering radius 0 < eps.
    profile.sizes.push_back(std::min(m, profile.traversal.order.size()));
  }
  return profile;
}

double h_value(const FiniteQMMSpace& space, double r) {
  if (!(r > 0.0)) fail(ValidationError::Kind::InvalidParams, "h_value: r must be positive");
  double h = kInf;
  for (std::size_t x = 0; x < space.size(); ++x) h = std::min(h, ball_mass(space, x, r));
  return h;
}

std::vector<double> h_profile(const FiniteQMMSpace& space, const std::vector<double>& radii) {
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) out.push_back(h_value(space, r));
  return out;
}

double separated_count_bound(const FiniteQMMSpace& space, double epsilon) {
  const double cd = space.quasi_triangle_constant();
  const double ct = space.symmetry_constant();
  return space.total_mass() / h_value(space, epsilon / (cd * ct));
}

double doubling_constant(const FiniteQMMSpace& space, double c, double delta) {
  if (!(c >= 1.0)) fail(ValidationError::Kind::InvalidParams, "doubling_constant: c must be >= 1");
  if (!(delta > 0.0)) fail(ValidationError::Kind::InvalidParams, "doubling_constant: delta must be positive");
  double best = 1.0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    const double small = ball_mass(space, x, delta);
    const double big = ball_mass(space, x, c * delta);
    best = std::max(best, big / small);
  }
  return best;
}

double doubling_sup(const FiniteQMMSpace& space, double c) {
  if (!(c >= 1.0)) fail(ValidationError::Kind::InvalidParams, "doubling_sup: c must be >= 1");
  const std::size_t n = space.size();
  double best = 1.0;
  for (std::size_t x = 0; x < n; ++x) {
    // Ball masses around x are constant on left-open right-closed intervals
    // between consecutive distance values, so the ratio as a function of delta
    // attains its sup at a right endpoint: a distance value or one divided by c.
    std::set<double> candidates;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = space.dist(x, j);
      if (v > 0.0) {
        candidates.insert(v);
        candidates.insert(v / c);
      }
    }
    for (double delta : candidates) {
      const double small = ball_mass(space, x, delta);
      if (small <= 0.0) continue;  // delta below every distance from x covers only x itself; mu(x) > 0 so this cannot happen for delta > 0
      best = std::max(best, ball_mass(space, x, c * delta) / small);
    }
  }
  return best;
}

DoublingIterationCheck doubling_iteration_bound(const FiniteQMMSpace& space, double c,
                                                double c_big, double delta) {
  if (!(c > 1.0)) fail(ValidationError::Kind::InvalidParams, "doubling_iteration_bound: c must be > 1");
  if (!(c_big >= c)) fail(ValidationError::Kind::InvalidParams, "doubling_iteration_bound: c_big must be >= c");
  DoublingIterationCheck check;
  check.measured = doubling_constant(space, c_big, delta);
  int k = 1;
  while (std::pow(c, k) < c_big) ++k;
  check.k = k;
  double bound = 1.0;
  for (int l = 1; l <= k; ++l) bound *= doubling_constant(space, c, c_big * delta / std::pow(c, l));
  check.bound = bound;
  check.holds = check.measured <= bound * (1.0 + 1e-12);
  return check;
}

AtInfinityResult doubling_at_infinity(const FiniteQMMSpace& space, std::size_t x0,
                                      const std::vector<double>& radii) {
  if (x0 >= space.size()) fail(ValidationError::Kind::BadIndex, "doubling_at_infinity: x0 out of range");
  const double cd = space.quasi_triangle_constant();
  const double total = space.total_mass();
  AtInfinityResult out;
  out.x0 = x0;
  out.radii = radii;
  std::sort(out.radii.begin(), out.radii.end());
  for (double r : out.radii) {
    if (!(r > 0.0)) fail(ValidationError::Kind::InvalidParams, "doubling_at_infinity: radii must be positive");
    const double tail_small = total - ball_mass(space, x0, r);
    const double tail_big = total - ball_mass(space, x0, cd * r);
    if (!(tail_big > 0.0))
      fail(ValidationError::Kind::EmptyTail, "doubling_at_infinity: no mass beyond dilated radius");
    out.ratios.push_back(tail_small / tail_big);
  }
  if (out.ratios.empty())
    fail(ValidationError::Kind::InvalidParams, "doubling_at_infinity: empty radius grid");
  out.liminf_estimate = *std::min_element(out.ratios.begin(), out.ratios.end());
  out.monotone_growth = out.ratios.size() >= 2;
  for (std::size_t i = 0; i + 1 < out.ratios.size(); ++i)
    if (out.ratios[i + 1] < out.ratios[i]) out.monotone_growth = false;
  if (out.monotone_growth && out.ratios.back() <= out.ratios.front()) out.monotone_growth = false;
  return out;
}

AhlforsFit ahlfors_lower_fit(const FiniteQMMSpace& space, double s,
                             const std::vector<double>& radii) {
  if (!(s > 0.0)) fail(ValidationError::Kind::InvalidParams, "ahlfors_lower_fit: s must be positive");
  if (radii.empty()) fail(ValidationError::Kind::InvalidParams, "ahlfors_lower_fit: empty radius grid");
  AhlforsFit fit;
  fit.s = s;
  fit.b = kInf;
  for (double r : radii) {
    if (!(r > 0.0)) fail(ValidationError::Kind::InvalidParams, "ahlfors_lower_fit: radii must be positive");
    for (std::size_t x = 0; x < space.size(); ++x)
      fit.b = std::min(fit.b, ball_mass(space, x, r) / std::pow(r, s));
  }
  fit.c_mu = doubling_sup(space, 2.0);
  fit.s_doubling = std::log2(fit.c_mu);
  return fit;
}

IntegrabilityReport integrability_functional(const FiniteQMMSpace& space, double r) {
  if (!(r > 0.0)) fail(ValidationError::Kind::InvalidParams, "integrability_functional: r must be positive");
  IntegrabilityReport report;
  report.r = r;
  double value = 0.0;
  for (std::size_t x = 0; x < space.size(); ++x)
    value += space.mu(x) / ball_mass(space, x, r);
  report.value = value;
  report.upper_bound = space.total_mass() / h_value(space, r);
  report.within_bound = report.value <= report.upper_bound * (1.0 + 1e-12);
  return report;
}

}  // namespace qmms
