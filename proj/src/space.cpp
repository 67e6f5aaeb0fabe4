#include "qmms/space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmms {

double FiniteQMMSpace::total_mass() const {
  return std::accumulate(mu_.begin(), mu_.end(), 0.0);
}

double FiniteQMMSpace::diameter() const {
  double m = 0.0;
  for (double v : dist_) m = std::max(m, v);
  return m;
}

double FiniteQMMSpace::min_positive_dist() const {
  double m = kInf;
  for (double v : dist_)
    if (v > 0.0) m = std::min(m, v);
  return m;
}

double FiniteQMMSpace::quasi_triangle_constant() const {
  if (cached_cd_) return *cached_cd_;
  const std::size_t n = size();
  // Repeated entries are allowed as long as not all three coincide; a repeat
  // (z = x or z = y) yields ratio exactly 1, so the scan starts from 1.
  double best = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dij = dist(i, j);
      for (std::size_t k = 0; k < n; ++k) {
        const double denom = std::max(dist(i, k), dist(k, j));
        if (denom > 0.0) best = std::max(best, dij / denom);
      }
    }
  }
  cached_cd_ = best;
  return best;
}

double FiniteQMMSpace::symmetry_constant() const {
  if (cached_cd_tilde_) return *cached_cd_tilde_;
  const std::size_t n = size();
  double best = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) best = std::max(best, dist(j, i) / dist(i, j));
  cached_cd_tilde_ = best;
  return best;
}

FiniteQMMSpace validate_space(std::vector<std::string> ids,
                              std::vector<double> dist,
                              std::vector<double> mu) {
  const std::size_t n = mu.size();
  if (n < 2) fail(ValidationError::Kind::BadShape, "space needs at least 2 points");
  if (ids.size() != n)
    fail(ValidationError::Kind::BadShape, "point_ids size does not match weights");
  if (dist.size() != n * n)
    fail(ValidationError::Kind::BadShape, "distance matrix is not n x n");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = dist[i * n + j];
      if (!std::isfinite(v))
        fail(ValidationError::Kind::NonfiniteEntry, "distance entry is not finite");
      if (i == j) {
        if (v != 0.0)
          fail(ValidationError::Kind::NonzeroDiagonal, "distance diagonal must be zero");
      } else {
        if (v < 0.0)
          fail(ValidationError::Kind::NegativeDistance, "negative distance between distinct points");
        if (v == 0.0)
          fail(ValidationError::Kind::ZeroOffDiagonal,
               "zero distance between distinct points (" + ids[i] + ", " + ids[j] + ")");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(mu[i]))
      fail(ValidationError::Kind::NonfiniteEntry, "weight entry is not finite");
    if (!(mu[i] > 0.0))
      fail(ValidationError::Kind::NonpositiveWeight, "weight of point " + ids[i] + " must be positive");
  }
  FiniteQMMSpace space;
  space.ids_ = std::move(ids);
  space.dist_ = std::move(dist);
  space.mu_ = std::move(mu);
  return space;
}

FiniteQMMSpace make_space(std::vector<double> dist, std::vector<double> mu) {
  std::vector<std::string> ids(mu.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = std::to_string(i);
  return validate_space(std::move(ids), std::move(dist), std::move(mu));
}

QuasiConstants quasi_constants(const FiniteQMMSpace& space) {
  return {space.quasi_triangle_constant(), space.symmetry_constant()};
}

FiniteQMMSpace symmetrize(const FiniteQMMSpace& space) {
  const std::size_t n = space.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      d[i * n + j] = std::max(space.dist(i, j), space.dist(j, i));
  return validate_space(space.point_ids(), std::move(d), space.weights());
}

FiniteQMMSpace snowflake(const FiniteQMMSpace& space, double s) {
  if (!(s > 0.0) || !std::isfinite(s))
    fail(ValidationError::Kind::InvalidParams, "snowflake exponent must be positive and finite");
  const std::size_t n = space.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) d[i * n + j] = std::pow(space.dist(i, j), s);
  return validate_space(space.point_ids(), std::move(d), space.weights());
}

Ball ball(const FiniteQMMSpace& space, std::size_t center, double radius) {
  if (center >= space.size()) fail(ValidationError::Kind::BadIndex, "ball center out of range");
  Ball b;
  b.center = center;
  b.radius = radius;
  for (std::size_t j = 0; j < space.size(); ++j)
    if (space.dist(center, j) < radius) b.members.push_back(j);
  return b;
}

double ball_mass(const FiniteQMMSpace& space, std::size_t center, double radius) {
  double m = 0.0;
  for (std::size_t j = 0; j < space.size(); ++j)
    if (space.dist(center, j) < radius) m += space.mu(j);
  return m;
}

std::vector<std::size_t> open_hull(const FiniteQMMSpace& space, std::size_t center, double radius) {
  const std::size_t n = space.size();
  const double cd = space.quasi_triangle_constant();
  const double floor_dist = space.min_positive_dist();
  std::vector<char> in(n, 0);
  for (std::size_t j : ball(space, center, radius).members) in[j] = 1;
  double r_k = radius / cd;
  for (;;) {
    bool grew = false;
    std::vector<std::size_t> current;
    for (std::size_t j = 0; j < n; ++j)
      if (in[j]) current.push_back(j);
    for (std::size_t y : current) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!in[j] && space.dist(y, j) < r_k) {
          in[j] = 1;
          grew = true;
        }
      }
    }
    if (!grew) break;
    r_k /= cd;
    // Once the radius cannot reach any other point the set is final.
    if (r_k < floor_dist && cd > 1.0) {
      // One more sweep at the current radius already happened; with radius
      // below the least positive distance only the points themselves remain.
      break;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n; ++j)
    if (in[j]) out.push_back(j);
  return out;
}

double set_diameter(const FiniteQMMSpace& space, const std::vector<std::size_t>& e) {
  if (e.empty()) fail(ValidationError::Kind::EmptySet, "set_diameter: empty set");
  double m = 0.0;
  for (std::size_t x : e)
    for (std::size_t y : e) m = std::max(m, space.dist(x, y));
  return m;
}

double dist_between_sets(const FiniteQMMSpace& space,
                         const std::vector<std::size_t>& e,
                         const std::vector<std::size_t>& f) {
  if (e.empty() || f.empty()) fail(ValidationError::Kind::EmptySet, "dist_between_sets: empty set");
  double m = kInf;
  for (std::size_t x : e)
    for (std::size_t y : f) m = std::min(m, space.dist(x, y));
  return m;
}

double dist_to_set(const FiniteQMMSpace& space, std::size_t x, const std::vector<std::size_t>& e) {
  if (e.empty()) fail(ValidationError::Kind::EmptySet, "dist_to_set: empty set");
  double m = kInf;
  for (std::size_t y : e) m = std::min(m, space.dist(x, y));
  return m;
}

std::vector<std::size_t> neighborhood(const FiniteQMMSpace& space,
                                      const std::vector<std::size_t>& e,
                                      double delta) {
  if (e.empty()) fail(ValidationError::Kind::EmptySet, "neighborhood: empty set");
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < space.size(); ++x)
    if (dist_to_set(space, x, e) < delta) out.push_back(x);
  return out;
}

NeighborhoodContainment closure_check(const FiniteQMMSpace& space,
                                      std::size_t center, double radius, double delta) {
  const Ball b = ball(space, center, radius);
  if (b.members.empty()) fail(ValidationError::Kind::EmptySet, "closure_check: empty ball");
  const std::vector<std::size_t> nb = neighborhood(space, b.members, delta);
  const Ball big = ball(space, center, space.quasi_triangle_constant() * radius);

  auto contains = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b2) {
    return std::includes(a.begin(), a.end(), b2.begin(), b2.end());
  };
  NeighborhoodContainment r;
  r.ball_in_neighborhood = contains(nb, b.members);
  r.neighborhood_in_dilated_ball = contains(big.members, nb);
  r.ball_size = b.members.size();
  r.neighborhood_size = nb.size();
  r.dilated_ball_size = big.members.size();
  return r;
}

void validate_function(const FiniteQMMSpace& space, const std::vector<double>& values) {
  if (values.size() != space.size())
    fail(ValidationError::Kind::BadShape, "function values size does not match space");
  for (double v : values)
    if (!std::isfinite(v)) fail(ValidationError::Kind::NonfiniteEntry, "function value not finite");
}

double lp_norm(const FiniteQMMSpace& space, const std::vector<double>& values, double p) {
  validate_function(space, values);
  return lp_norm_weighted(space.weights(), values, p);
}

double lp_norm_weighted(const std::vector<double>& nu, const std::vector<double>& values, double p) {
  if (nu.size() != values.size())
    fail(ValidationError::Kind::BadShape, "weight vector size does not match values");
  if (p == kInf) {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (nu[i] > 0.0) m = std::max(m, std::abs(values[i]));
    return m;
  }
  if (!(p > 0.0)) fail(ValidationError::Kind::BadExponents, "lp_norm: p must be positive");
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    s += nu[i] * pow_nn(std::abs(values[i]) / scale, p);
  return scale * std::pow(s, 1.0 / p);
}

}  // namespace qmms
