#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qmms/common.hpp"
#include "qmms/space.hpp"
#include "test_helpers.hpp"

using namespace qmms;
using qmms_test::random_space;

namespace {

FiniteQMMSpace collinear_half() {
  // Points {0, 1/2, 1} on the line: the classical worst case for the
  // quasi-triangle constant of a genuine metric.
  return make_space({0.0, 0.5, 1.0, 0.5, 0.0, 0.5, 1.0, 0.5, 0.0}, {1.0, 1.0, 1.0});
}

}  // namespace

TEST_CASE("collinear triple attains quasi constant two") {
  const FiniteQMMSpace space = collinear_half();
  CHECK(space.quasi_triangle_constant() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(space.symmetry_constant() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(space.diameter() == 1.0);
  CHECK(space.min_positive_dist() == 0.5);
  CHECK(space.total_mass() == 3.0);
}

TEST_CASE("asymmetric two-point space") {
  const FiniteQMMSpace space = make_space({0.0, 1.0, 3.0, 0.0}, {1.0, 2.0});
  // With only two points every triple degenerates, so the quasi constant is 1,
  // while the symmetry constant records the worst orientation ratio.
  CHECK(space.quasi_triangle_constant() == doctest::Approx(1.0));
  CHECK(space.symmetry_constant() == doctest::Approx(3.0));
  CHECK(dist_between_sets(space, {0}, {1}) == 1.0);
  CHECK(dist_between_sets(space, {1}, {0}) == 3.0);
}

TEST_CASE("validation rejects malformed input with typed errors") {
  auto expect_kind = [](ValidationError::Kind kind, auto&& thunk) {
    try {
      thunk();
      FAIL_CHECK("expected a validation error");
    } catch (const ValidationError& err) {
      CHECK(err.kind() == kind);
    }
  };
  expect_kind(ValidationError::Kind::BadShape, [] { make_space({0.0}, {1.0}); });
  expect_kind(ValidationError::Kind::BadShape,
              [] { make_space({0.0, 1.0, 1.0}, {1.0, 1.0}); });
  expect_kind(ValidationError::Kind::NonzeroDiagonal,
              [] { make_space({0.5, 1.0, 1.0, 0.0}, {1.0, 1.0}); });
  expect_kind(ValidationError::Kind::ZeroOffDiagonal,
              [] { make_space({0.0, 0.0, 1.0, 0.0}, {1.0, 1.0}); });
  expect_kind(ValidationError::Kind::NegativeDistance,
              [] { make_space({0.0, -1.0, 1.0, 0.0}, {1.0, 1.0}); });
  expect_kind(ValidationError::Kind::NonfiniteEntry,
              [] { make_space({0.0, kInf, 1.0, 0.0}, {1.0, 1.0}); });
  expect_kind(ValidationError::Kind::NonpositiveWeight,
              [] { make_space({0.0, 1.0, 1.0, 0.0}, {1.0, 0.0}); });
  expect_kind(ValidationError::Kind::EmptySet,
              [] { set_diameter(collinear_half(), {}); });
}

TEST_CASE("snowflake raises both constants to the power s") {
  Rng rng(31);
  const FiniteQMMSpace space = random_space(rng, 6, 0.3, 2.5);
  const double s = 0.6;
  const FiniteQMMSpace flake = snowflake(space, s);
  CHECK(flake.quasi_triangle_constant() ==
        doctest::Approx(std::pow(space.quasi_triangle_constant(), s)).epsilon(1e-12));
  CHECK(flake.symmetry_constant() ==
        doctest::Approx(std::pow(space.symmetry_constant(), s)).epsilon(1e-12));
  // Ultrametric invariance: constants equal to 1 stay 1 under snowflaking.
  std::vector<double> ultra = {0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0};
  const FiniteQMMSpace u = make_space(ultra, {1.0, 1.0, 1.0});
  CHECK(u.quasi_triangle_constant() == 1.0);
  CHECK(snowflake(u, 0.5).quasi_triangle_constant() == 1.0);
}

TEST_CASE("balls are strict and hulls are sandwiched") {
  const FiniteQMMSpace space = collinear_half();
  CHECK(ball(space, 0, 0.5).members == std::vector<std::size_t>{0});
  CHECK(ball(space, 0, 0.500001).members == std::vector<std::size_t>{0, 1});
  CHECK(ball(space, 0, 1.5).members == std::vector<std::size_t>{0, 1, 2});
  CHECK(ball_mass(space, 0, 0.75) == 2.0);

  const std::vector<std::size_t> hull = open_hull(space, 0, 0.75);
  const std::vector<std::size_t> inner = ball(space, 0, 0.75).members;
  const std::vector<std::size_t> outer = ball(space, 0, 1.5).members;
  CHECK(std::includes(hull.begin(), hull.end(), inner.begin(), inner.end()));
  CHECK(std::includes(outer.begin(), outer.end(), hull.begin(), hull.end()));
}

TEST_CASE("neighborhood containments hold when the scale condition is met") {
  const FiniteQMMSpace space = collinear_half();
  // symmetry constant 1, so delta <= r suffices.
  const NeighborhoodContainment res = closure_check(space, 0, 0.6, 0.5);
  CHECK(res.ball_in_neighborhood);
  CHECK(res.neighborhood_in_dilated_ball);
  CHECK(res.ball_size == 2);
  CHECK(res.neighborhood_size == 2);   // the point at 1 sits at distance exactly 0.5
  CHECK(res.dilated_ball_size == 3);
}

TEST_CASE("weighted Lp norms") {
  const FiniteQMMSpace space =
      make_space({0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0}, {1.0, 2.0, 4.0});
  const std::vector<double> u = {1.0, -2.0, 0.5};
  CHECK(lp_norm(space, u, 1.0) == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(lp_norm(space, u, 2.0) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
  CHECK(lp_norm(space, u, kInf) == 2.0);
  // A sub-one exponent still gives a positive homogeneous quantity.
  CHECK(lp_norm(space, u, 0.5) ==
        doctest::Approx(std::pow(1.0 + 2.0 * std::sqrt(2.0) + 4.0 * std::sqrt(0.5), 2.0))
            .epsilon(1e-12));
  const std::vector<double> nu = {0.0, 3.0, 0.0};
  CHECK(lp_norm_weighted(nu, u, 2.0) == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("set distances and diameters") {
  const FiniteQMMSpace space = collinear_half();
  CHECK(set_diameter(space, {0, 2}) == 1.0);
  CHECK(dist_to_set(space, 2, {0, 1}) == 0.5);
  const std::vector<std::size_t> nb = neighborhood(space, {0}, 0.6);
  CHECK(nb == std::vector<std::size_t>{0, 1});
}
