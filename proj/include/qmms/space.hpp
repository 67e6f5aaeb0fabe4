#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qmms/common.hpp"

namespace qmms {

/// A finite quasi-metric measure space: points with ids, a strictly positive
/// off-diagonal distance matrix (not necessarily symmetric), and strictly
/// positive atom weights.  Distances are stored dense row-major.
class FiniteQMMSpace {
public:
  FiniteQMMSpace() = default;

  std::size_t size() const { return mu_.size(); }

  double dist(std::size_t i, std::size_t j) const { return dist_[i * size() + j]; }
  double mu(std::size_t i) const { return mu_[i]; }

  const std::vector<std::string>& point_ids() const { return ids_; }
  const std::vector<double>& dist_matrix() const { return dist_; }
  const std::vector<double>& weights() const { return mu_; }

  double total_mass() const;
  /// Largest distance over ordered pairs (0 for a single point).
  double diameter() const;
  /// Smallest strictly positive distance.
  double min_positive_dist() const;

  /// Smallest constant C with d(x,y) <= C*max(d(x,z), d(z,y)) over all triples
  /// (repeated entries allowed, not all three equal).  Cached after first call.
  double quasi_triangle_constant() const;
  /// Smallest constant C with d(y,x) <= C*d(x,y) over all pairs.  Cached.
  double symmetry_constant() const;

  friend FiniteQMMSpace validate_space(std::vector<std::string> ids,
                                       std::vector<double> dist,
                                       std::vector<double> mu);

private:
  std::vector<std::string> ids_;
  std::vector<double> dist_;  // n*n row-major
  std::vector<double> mu_;
  mutable std::optional<double> cached_cd_;
  mutable std::optional<double> cached_cd_tilde_;
};

/// Validates raw data and constructs a space.  Requirements: n >= 2, square
/// matrix, zero diagonal, finite entries, d(x,y) > 0 for x != y, weights > 0.
FiniteQMMSpace validate_space(std::vector<std::string> ids,
                              std::vector<double> dist,
                              std::vector<double> mu);

/// Convenience: builds ids "0", "1", ... automatically.
FiniteQMMSpace make_space(std::vector<double> dist, std::vector<double> mu);

struct QuasiConstants {
  double cd;        // quasi-triangle constant
  double cd_tilde;  // symmetry constant
};

QuasiConstants quasi_constants(const FiniteQMMSpace& space);

/// Symmetrized space: d_sym(x,y) = max(d(x,y), d(y,x)); weights unchanged.
FiniteQMMSpace symmetrize(const FiniteQMMSpace& space);

/// Snowflake: distances raised to the power s (s > 0), weights unchanged.
FiniteQMMSpace snowflake(const FiniteQMMSpace& space, double s);

/// Open ball B(center, r) = { y : d(center, y) < r } (strict inequality).
struct Ball {
  std::size_t center = 0;
  double radius = 0.0;
  std::vector<std::size_t> members;
};

Ball ball(const FiniteQMMSpace& space, std::size_t center, double radius);
double ball_mass(const FiniteQMMSpace& space, std::size_t center, double radius);

/// Chained-ball hull: starting from B(x, r), repeatedly unions balls of radius
/// r / C^{k+1} around the current set (C the quasi-triangle constant), until the
/// set stabilizes or the radius falls below the least positive distance.
/// Always satisfies B(x, r) subset hull subset B(x, C*r).
std::vector<std::size_t> open_hull(const FiniteQMMSpace& space, std::size_t center, double radius);

/// Largest distance between points of E (ordered pairs).  Throws on empty E.
double set_diameter(const FiniteQMMSpace& space, const std::vector<std::size_t>& e);

/// inf over x in E, y in F of d(x, y).  Order of arguments matters when the
/// distance is asymmetric.  Throws on empty input.
double dist_between_sets(const FiniteQMMSpace& space,
                         const std::vector<std::size_t>& e,
                         const std::vector<std::size_t>& f);

/// dist(x, E) = inf over y in E of d(x, y).
double dist_to_set(const FiniteQMMSpace& space, std::size_t x, const std::vector<std::size_t>& e);

/// Open neighborhood (E)_delta = { x : dist(x, E) < delta }.
std::vector<std::size_t> neighborhood(const FiniteQMMSpace& space,
                                      const std::vector<std::size_t>& e,
                                      double delta);

/// On a finite space with positive off-diagonal distances every subset is
/// closed, so the closure check reduces to the two containments
///   B(x,r) subset (B(x,r))_delta  and  (B(x,r))_delta subset B(x, C*r)
/// which hold whenever C_tilde * delta <= r.
struct NeighborhoodContainment {
  bool ball_in_neighborhood = false;
  bool neighborhood_in_dilated_ball = false;
  std::size_t ball_size = 0;
  std::size_t neighborhood_size = 0;
  std::size_t dilated_ball_size = 0;
};

NeighborhoodContainment closure_check(const FiniteQMMSpace& space,
                                      std::size_t center, double radius, double delta);

/// Validates a function's values against a space (size match, finite entries).
void validate_function(const FiniteQMMSpace& space, const std::vector<double>& values);

/// ||u||_{L^p(mu)} for p in (0, inf]; p = inf gives max |u_i| (all atoms carry
/// positive mass, so the essential sup is the plain max).
double lp_norm(const FiniteQMMSpace& space, const std::vector<double>& values, double p);

/// Same but against an alternative weight vector nu (size checked).
double lp_norm_weighted(const std::vector<double>& nu, const std::vector<double>& values, double p);

}  // namespace qmms
