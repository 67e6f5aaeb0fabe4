#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qmms/common.hpp"
#include "qmms/compactness.hpp"
#include "qmms/examples.hpp"
#include "qmms/norms.hpp"
#include "qmms/oracle.hpp"
#include "qmms/space.hpp"
#include "test_helpers.hpp"

using namespace qmms;
using qmms_test::random_function;
using qmms_test::random_space;

namespace {

SolveOptions tight_options() {
  SolveOptions opts;
  opts.tolerance = 1e-10;
  opts.gap_tolerance = 1e-9;
  opts.max_iterations = 400000;
  return opts;
}

}  // namespace

TEST_CASE("metric of convergence in measure") {
  Rng rng(101);
  const FiniteQMMSpace space = random_space(rng, 6);
  std::vector<double> f = random_function(rng, 6);
  CHECK(l0_distance(space, f, f) == 0.0);
  std::vector<double> g(f);
  for (double& v : g) v += 1.0;
  // |f-g| = 1 everywhere: the integrand is 1/2.
  CHECK(l0_distance(space, f, g) == doctest::Approx(space.total_mass() / 2.0).epsilon(1e-14));
  CHECK(l0_distance(space, f, g) == doctest::Approx(l0_distance(space, g, f)).epsilon(1e-14));
}

TEST_CASE("exceptional sets are uniformly small") {
  Rng rng(103);
  const FiniteQMMSpace space = random_space(rng, 10, 0.3, 2.0);
  std::vector<std::vector<double>> members, gradients;
  for (int m = 0; m < 3; ++m) {
    members.push_back(random_function(rng, 10, -1.5, 1.5));
    gradients.push_back(
        min_gradient_sobolev(space, members.back(), 0.8, 2.0, tight_options())
            .gradient.values[0]);
  }
  const double eps = 0.3, eta = 0.25;
  const ExceptionalSetsResult res =
      sobolev_exceptional_sets(space, members, gradients, 0.8, 2.0, eps, eta);
  CHECK(res.uniform_small);
  for (int m = 0; m < 3; ++m) {
    CHECK(res.exceptional_mass[m] < eta);
    double mass = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      const bool in_set = std::max(std::abs(members[m][i]), gradients[m][i]) > res.lambda;
      CHECK(static_cast<bool>(res.exceptional[m][i]) == in_set);
      if (in_set) mass += space.mu(i);
    }
    CHECK(res.exceptional_mass[m] == doctest::Approx(mass).epsilon(1e-14));
  }

  CHECK_THROWS_AS(sobolev_exceptional_sets(space, members,
                                           {gradients[0], gradients[1]}, 0.8, 2.0, eps, eta),
                  ValidationError);
  const std::vector<std::vector<double>> zeros(3, std::vector<double>(10, 0.0));
  CHECK_THROWS_AS(sobolev_exceptional_sets(space, members, zeros, 0.8, 2.0, eps, eta),
                  ValidationError);
}

TEST_CASE("quantized net certifies a bounded family") {
  Rng rng(107);
  const FiniteQMMSpace space = random_space(rng, 10, 0.5, 2.0);
  std::vector<std::vector<double>> members, gradients;
  for (int m = 0; m < 4; ++m) {
    members.push_back(random_function(rng, 10, -1.5, 1.5));
    gradients.push_back(
        min_gradient_sobolev(space, members.back(), 1.0, 2.0, tight_options())
            .gradient.values[0]);
  }
  const double eps = 0.5;
  const FrechetResult res = frechet_certify(space, members, gradients, 1.0, 2.0, eps);
  REQUIRE(res.certified);
  CHECK(res.obstruction.empty());
  CHECK(res.delta_f == doctest::Approx(eps / (1.0 + 2.0 * space.total_mass())).epsilon(1e-14));
  for (double err : res.member_errors) CHECK(err < eps);
  CHECK(res.net_size_log10 ==
        doctest::Approx(static_cast<double>(res.cells.size()) *
                        std::log10(2.0 * static_cast<double>(res.quantization_levels) + 1.0))
            .epsilon(1e-12));
  // Cells partition the index set.
  std::vector<std::size_t> covered;
  for (const FrechetCell& cell : res.cells)
    covered.insert(covered.end(), cell.members.begin(), cell.members.end());
  std::sort(covered.begin(), covered.end());
  std::vector<std::size_t> everything(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) everything[i] = i;
  CHECK(covered == everything);

  FrechetOptions tiny;
  tiny.cell_budget = 2;
  const FrechetResult refused = frechet_certify(space, members, gradients, 1.0, 2.0, eps, tiny);
  CHECK_FALSE(refused.certified);
  CHECK(refused.obstruction == "cell_budget");
}

TEST_CASE("equi-integrability modulus on dyadic atoms") {
  // Weights 1/2, 1/4, 1/8, 1/16; mass sits on the lightest atom.
  const GeneratedSpace gen = generate("discrete_N", {{"n", 4.0}});
  const std::vector<double> f = {0.0, 0.0, 0.0, 4.0};
  {
    const EquiIntegrabilityResult res = equi_integrability_modulus(gen.space, f, 1.0, 0.0625);
    CHECK(res.modulus_lower == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(res.modulus_upper == doctest::Approx(0.25).epsilon(1e-14));
  }
  {
    const EquiIntegrabilityResult res = equi_integrability_modulus(gen.space, f, 1.0, 0.03125);
    CHECK(res.modulus_lower == 0.0);   // the atom does not fit
    CHECK(res.modulus_upper == doctest::Approx(0.125).epsilon(1e-14));  // half of it does
  }
  {
    const EquiIntegrabilityResult res = equi_integrability_modulus(gen.space, f, 1.0, 1.0);
    CHECK(res.modulus_lower == doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_CASE("localization inequality holds for feasible gradients") {
  Rng rng(109);
  std::uniform_real_distribution<double> noise(0.0, 0.3), numass(0.1, 2.0), coin(0.0, 1.0);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 4 + rep % 5;
    const FiniteQMMSpace space = random_space(rng, n, 0.3, 2.5);
    const std::vector<double> u = random_function(rng, n, -1.5, 1.5);
    const double alpha = (rep % 2 == 0) ? 0.5 : 1.0;
    const double p = (rep % 3 == 0) ? 1.0 : ((rep % 3 == 1) ? 1.5 : 2.0);
    // Feasible gradient: half the largest incident constraint plus noise.
    const ConstraintSystem system = build_constraints(space, u, alpha, true);
    std::vector<double> g(n, 0.0);
    if (!system.levels.empty())
      for (const PairConstraint& pc : system.levels[0].pairs) {
        g[pc.i] = std::max(g[pc.i], 0.5 * pc.c);
        g[pc.j] = std::max(g[pc.j], 0.5 * pc.c);
      }
    for (double& v : g) v += noise(rng);
    std::vector<double> nu(n, 0.0);
    for (double& v : nu)
      if (coin(rng) > 0.35) v = numass(rng);
    std::vector<std::size_t> d_set;
    for (std::size_t i = 0; i < n; ++i)
      if (coin(rng) > 0.5) d_set.push_back(i);
    const double r = (rep % 3 == 0) ? 0.3 : ((rep % 3 == 1) ? 1.0 : 2.7);
    const KeyInequalityResult res = key_inequality_check(space, u, g, nu, d_set, r, alpha, p);
    CHECK(res.holds);
    CHECK(res.lhs <= res.rhs + 1e-9 * (1.0 + res.rhs));
  }
  // An infeasible gradient is rejected rather than silently evaluated.
  const FiniteQMMSpace space = random_space(rng, 5);
  const std::vector<double> u = random_function(rng, 5);
  const std::vector<double> zeros(5, 0.0);
  CHECK_THROWS_AS(
      key_inequality_check(space, u, zeros, space.weights(), {0, 1}, 1.0, 1.0, 2.0),
      ValidationError);
}

TEST_CASE("separated bumps on the geometric-weight space have exact gaps") {
  const GeneratedSpace gen = generate("discrete_N", {{"n", 20.0}});
  const BumpWitnessResult res = separated_bump_witness(gen.space, 0.4, 0.5, 2.0, 1.0);
  REQUIRE(res.centers.size() == 20);  // unit distances keep every point
  CHECK(res.balls_disjoint);
  CHECK(std::abs(res.min_gap_p - 2.0) <= 1e-12);
  CHECK(res.gap_at_least_two);
  CHECK(res.doubling_delta == 1.0);
  // f_j is the indicator of its center, normalized in L^p.
  const std::size_t j0 = res.centers[0];
  CHECK(res.functions[0][j0] ==
        doctest::Approx(1.0 / std::sqrt(gen.space.mu(j0))).epsilon(1e-12));
  for (double b : res.norm_bounds) CHECK(std::isfinite(b));
  // A separation scale beyond the diameter leaves a single center.
  CHECK_THROWS_AS(separated_bump_witness(gen.space, 2.0, 0.5, 2.0, 1.0), ValidationError);
}

TEST_CASE("escaping-tail family on the dyadic-tail space") {
  const FiniteQMMSpace space = make_dyadic_tail_space(4, 8.0);
  const TailWitnessResult res =
      tail_bump_witness(space, 0, {1.0, 2.0, 4.0}, 0.5, 2.0, 1.0);
  REQUIRE(res.radii.size() == 3);
  for (double m : res.unit_masses) CHECK(std::abs(m - 1.0) <= 1e-12);
  // Truncated tail ratios approach 15/7, 7/3, 3 (midpoint error at res 8 is a
  // few percent); all stay below the limiting ratio 4.
  CHECK(res.ratios[0] == doctest::Approx(15.0 / 7.0).epsilon(0.1));
  CHECK(res.ratios[1] == doctest::Approx(7.0 / 3.0).epsilon(0.1));
  CHECK(res.ratios[2] == doctest::Approx(3.0).epsilon(0.1));
  for (double ratio : res.ratios) CHECK(ratio <= 4.0);
  CHECK(res.not_equi_integrable);
  CHECK(res.modulus_at_delta >= 1.0 - 1e-9);
  for (double b : res.norm_bounds) CHECK(std::isfinite(b));
  CHECK_THROWS_AS(tail_bump_witness(space, 0, {100.0}, 0.5, 2.0, 1.0), ValidationError);
}

TEST_CASE("interpolation between Lebesgue exponents") {
  Rng rng(113);
  std::uniform_real_distribution<double> de(0.4, 4.2);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 3 + rep % 6;
    const FiniteQMMSpace space = random_space(rng, n);
    std::vector<double> f = random_function(rng, n, -2.0, 2.0);
    if (rep % 4 == 0) f[rep % n] = 0.0;
    double e0 = de(rng), e1 = de(rng), e2 = de(rng);
    if (e0 > e1) std::swap(e0, e1);
    if (e1 > e2) std::swap(e1, e2);
    if (e0 > e1) std::swap(e0, e1);
    if (e1 - e0 < 1e-3 || e2 - e1 < 1e-3) continue;
    const double p_star = (rep % 5 == 0) ? kInf : e2;
    const InterpolationResult res = interpolation_check(space, f, e0, e1, p_star);
    CHECK(res.holds);
    const HolderLpResult h = holder_lp_check(space, f, e0, e1);
    CHECK(h.holds);
  }
  // Pure atom indicators give equality.
  const FiniteQMMSpace space = random_space(rng, 6);
  std::vector<double> f(6, 0.0);
  f[3] = 2.2;
  const InterpolationResult res = interpolation_check(space, f, 0.7, 1.3, 2.9);
  CHECK(std::abs(res.lhs - res.rhs) <= 1e-12 * (1.0 + res.rhs));
  // Constants achieve the finite-mass comparison exactly.
  const std::vector<double> ones(6, 1.3);
  const HolderLpResult h = holder_lp_check(space, ones, 0.9, 2.1);
  CHECK(std::abs(h.lhs - h.rhs) <= 1e-12 * (1.0 + h.rhs));
  CHECK_THROWS_AS(interpolation_check(space, f, 1.3, 0.7, 2.9), ValidationError);
}
