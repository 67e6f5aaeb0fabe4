#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qmms/common.hpp"
#include "qmms/norms.hpp"
#include "qmms/oracle.hpp"
#include "qmms/space.hpp"
#include "test_helpers.hpp"

using namespace qmms;
using qmms_test::random_function;
using qmms_test::random_space;

TEST_CASE("one-constraint enumeration matches the closed form") {
  Rng rng(71);
  std::uniform_real_distribution<double> dw(0.2, 3.0), dc(0.3, 2.5);
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    for (int rep = 0; rep < 10; ++rep) {
      const double w1 = dw(rng), w2 = dw(rng), c = dc(rng);
      const std::vector<PairConstraint> pairs = {{0, 1, c}};
      const OracleResult res = oracle_core(2, {w1, w2}, p, pairs);
      CHECK(res.seminorm ==
            doctest::Approx(two_point_seminorm(c, w1, w2, p)).epsilon(1e-9));
      // The optimal gradient is feasible.
      CHECK(res.gradient[0] + res.gradient[1] >= c - 1e-9);
    }
  }
}

TEST_CASE("two points with equal mass split the increment evenly") {
  const FiniteQMMSpace space = make_space({0.0, 1.0, 1.0, 0.0}, {0.5, 0.5});
  const OracleResult res = oracle_sobolev(space, {0.0, 1.0}, 1.0, 2.0);
  CHECK(res.seminorm == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(res.gradient[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(res.gradient[1] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("linear programs pick the cheapest cover") {
  // u = (0, 1, 1) with unit distances: constraints g0+g1 >= 1 and g0+g2 >= 1.
  const std::vector<double> d = {0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0};
  const std::vector<double> u = {0.0, 1.0, 1.0};
  {
    const FiniteQMMSpace space = make_space(d, {1.0, 1.0, 1.0});
    const OracleResult res = oracle_sobolev(space, u, 1.0, 1.0);
    CHECK(res.seminorm == doctest::Approx(1.0).epsilon(1e-10));  // g0 = 1 covers both
  }
  {
    const FiniteQMMSpace space = make_space(d, {3.0, 1.0, 1.0});
    const OracleResult res = oracle_sobolev(space, u, 1.0, 1.0);
    CHECK(res.seminorm == doctest::Approx(2.0).epsilon(1e-10));  // g1 = g2 = 1 is cheaper
  }
}

TEST_CASE("constant functions have zero seminorm") {
  Rng rng(73);
  const FiniteQMMSpace space = random_space(rng, 4);
  const OracleResult res = oracle_sobolev(space, {0.7, 0.7, 0.7, 0.7}, 1.0, 2.0);
  CHECK(res.seminorm == 0.0);
  for (double g : res.gradient) CHECK(g == 0.0);
}

TEST_CASE("seminorm grows with the smoothness exponent on a small-diameter space") {
  // All distances below one: raising alpha only tightens every constraint.
  Rng rng(79);
  const FiniteQMMSpace space = random_space(rng, 4, 0.2, 0.8);
  const std::vector<double> u = random_function(rng, 4);
  double prev = 0.0;
  for (double alpha : {0.5, 1.0, 2.0}) {
    const double val = oracle_sobolev(space, u, alpha, 1.5).seminorm;
    CHECK(val >= prev - 1e-12);
    prev = val;
  }
}

TEST_CASE("homogeneity of the minimal seminorm") {
  Rng rng(83);
  for (double p : {1.0, 1.5}) {
    const FiniteQMMSpace space = random_space(rng, 4);
    std::vector<double> u = random_function(rng, 4);
    const double base = oracle_sobolev(space, u, 0.8, p).seminorm;
    for (double& v : u) v *= 3.7;
    const double scaled = oracle_sobolev(space, u, 0.8, p).seminorm;
    CHECK(scaled == doctest::Approx(3.7 * base).epsilon(1e-8));
  }
}

TEST_CASE("level-binned combination is consistent across q") {
  Rng rng(89);
  const FiniteQMMSpace space = random_space(rng, 4, 0.2, 3.0);
  const std::vector<double> u = random_function(rng, 4);
  const double alpha = 0.9, p = 2.0;
  // Per-level optimal values, combined by hand.
  const ConstraintSystem system = build_constraints(space, u, alpha, false);
  std::vector<double> level_values;
  for (const LevelConstraints& level : system.levels) {
    std::vector<double> w(space.weights());
    level_values.push_back(oracle_core(space.size(), w, p, level.pairs).seminorm);
  }
  for (double q : {1.0, 2.0, kInf}) {
    double expected = 0.0;
    if (q == kInf) {
      for (double v : level_values) expected = std::max(expected, v);
    } else {
      for (double v : level_values) expected += std::pow(v, q);
      expected = std::pow(expected, 1.0 / q);
    }
    CHECK(oracle_besov_seminorm(space, u, alpha, p, q) ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("enumeration caps are enforced") {
  Rng rng(97);
  {
    const FiniteQMMSpace space = random_space(rng, 7);
    const std::vector<double> u = random_function(rng, 7);
    CHECK_THROWS_AS(oracle_sobolev(space, u, 1.0, 1.0), ValidationError);
  }
  {
    const FiniteQMMSpace space = random_space(rng, 6);
    const std::vector<double> u = random_function(rng, 6);
    CHECK_THROWS_AS(oracle_sobolev(space, u, 1.0, 2.0), ValidationError);
  }
}
