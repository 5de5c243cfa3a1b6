#include <qdef/covariant.hpp>
#include <qdef/defcomp.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "testutil.hpp"

using namespace qdef;
using testutil::random_density;

namespace {

std::array<double, 3> random_ball(NormalSampler& g, double radius = 1.0) {
  for (;;) {
    std::array<double, 3> v = {g.uniform_open() * 2.0 - 1.0, g.uniform_open() * 2.0 - 1.0,
                               g.uniform_open() * 2.0 - 1.0};
    if (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] <= 1.0)
      return {v[0] * radius, v[1] * radius, v[2] * radius};
  }
}

Experiment orbit_experiment(int d, const Mat& seed) {
  Experiment e;
  e.dim = d;
  for (int t = 0; t < d; ++t)
    for (int s = 0; s < d; ++s) {
      e.labels.push_back("g" + std::to_string(t) + std::to_string(s));
      const Mat w = discrete_weyl(d, t, s);
      e.states.push_back((w * seed * w.adjoint()).hermitized());
    }
  return e;
}

}  // namespace

TEST_CASE("depolarizing closed form fixtures", "[covariant]") {
  // z >= u branch
  DepolarizingResult r = depolarizing_deficiency({0.6, {0.3, 0.4, 0.8}});
  CHECK(r.delta == Catch::Approx(0.5 * std::sqrt(0.2 * 0.2 + 0.3 * 0.3 + 0.4 * 0.4)).margin(1e-15));
  CHECK(r.lambda_opt == Catch::Approx(1.0));

  // exact match at lambda = 1
  r = depolarizing_deficiency({0.7, {0.0, 0.0, 0.7}});
  CHECK(r.delta == Catch::Approx(0.0).margin(1e-15));

  // z <= 0 branch: the best output is the maximally mixed state
  r = depolarizing_deficiency({0.5, {0.3, 0.0, -0.4}});
  CHECK(r.delta == Catch::Approx(0.5 * 0.5).margin(1e-15));
  CHECK(r.lambda_opt == Catch::Approx(0.0));

  // middle branch
  r = depolarizing_deficiency({0.8, {0.1, 0.2, 0.4}});
  CHECK(r.delta == Catch::Approx(0.5 * std::sqrt(0.05)).margin(1e-15));
  CHECK(r.lambda_opt == Catch::Approx(0.5));

  // degenerate u = 0
  r = depolarizing_deficiency({0.0, {0.3, 0.0, 0.4}});
  CHECK(r.delta == Catch::Approx(0.25).margin(1e-15));
  CHECK(r.lambda_opt == 0.0);

  CHECK_THROWS_AS(depolarizing_deficiency({1.5, {0, 0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(depolarizing_deficiency({0.5, {1, 1, 1}}), std::invalid_argument);
}

TEST_CASE("piecewise formula equals direct 1-D minimization", "[covariant]") {
  NormalSampler g(71);
  for (int trial = 0; trial < 40; ++trial) {
    const double u = g.uniform_open();
    const auto target = random_ball(g);
    DepolarizingResult r = depolarizing_deficiency({u, target});
    const double x = target[0], y = target[1], z = target[2];
    ScalarOpt opt = golden_section_minimize(
        [&](double lam) {
          return 0.5 * std::sqrt((z - lam * u) * (z - lam * u) + x * x + y * y);
        },
        0.0, 1.0, 1e-10);
    CHECK(r.delta == Catch::Approx(opt.value).margin(1e-9));
  }
}

TEST_CASE("bloch hull distance fixtures", "[covariant]") {
  const std::array<double, 3> x0 = {0.3, -0.5, 0.2};
  CHECK(bloch_hull_deficiency(x0, x0) == Catch::Approx(0.0).margin(1e-12));

  CHECK(bloch_hull_deficiency({0.8, 0.0, 0.0}, {0.0, 0.5, 0.0}) == Catch::Approx(0.5).margin(1e-12));

  const std::array<double, 3> y = {0.1, 0.2, -0.3};
  CHECK(bloch_hull_deficiency({0.0, 0.0, 0.0}, y) ==
        Catch::Approx(std::sqrt(0.01 + 0.04 + 0.09)).margin(1e-12));

  // the hull contains the origin, so the center is always reachable
  CHECK(bloch_hull_deficiency({0.4, 0.3, 0.8}, {0.0, 0.0, 0.0}) == Catch::Approx(0.0).margin(1e-12));

  CHECK_THROWS_AS(bloch_hull_deficiency({2.0, 0.0, 0.0}, {0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("weyl orbit deficiency fixtures", "[covariant]") {
  // sigma0 = rho0: exact, all weight on the identity element
  Mat rho0 = bloch_to_state(0.3, 0.2, 0.5);
  WeylOrbitResult r = weyl_orbit_deficiency({2, rho0, rho0});
  CHECK(r.solver.status == SolveStatus::optimal);
  CHECK(r.delta <= 1e-6);
  CHECK(r.weights[0] == Catch::Approx(1.0).margin(1e-5));

  // segment hull fixture
  r = weyl_orbit_deficiency({2, bloch_to_state(0.8, 0.0, 0.0), bloch_to_state(0.0, 0.5, 0.0)});
  CHECK(r.delta == Catch::Approx(0.5).margin(1e-6));

  // the maximally mixed target is always reachable by symmetry
  NormalSampler g(72);
  r = weyl_orbit_deficiency({2, random_density(g, 2), Mat::identity(2) * cplx(0.5)});
  CHECK(r.delta <= 1e-6);

  CHECK_THROWS_AS(weyl_orbit_deficiency({2, Mat::identity(2), Mat::identity(2) * cplx(0.5)}),
                  std::invalid_argument);
}

TEST_CASE("weyl orbit agrees with the Bloch hull geometry", "[covariant]") {
  NormalSampler g(73);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x0 = random_ball(g, 0.95);
    const auto y0 = random_ball(g, 0.95);
    WeylOrbitResult r = weyl_orbit_deficiency({2, bloch_to_state(x0), bloch_to_state(y0)});
    const double hull = bloch_hull_deficiency(x0, y0);
    CHECK(r.delta == Catch::Approx(hull).margin(1e-6));
    CHECK(r.delta >= -1e-12);
    CHECK(r.delta <= 2.0);
    double sum = 0.0;
    for (double w : r.weights) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("orbit reduction matches the full randomization SDP", "[covariant]") {
  NormalSampler g(74);
  for (int trial = 0; trial < 2; ++trial) {
    Mat rho0 = random_density(g, 2), sigma0 = random_density(g, 2);
    WeylOrbitResult reduced = weyl_orbit_deficiency({2, rho0, sigma0});
    DeficiencyReport full = quantum_deficiency(orbit_experiment(2, rho0), orbit_experiment(2, sigma0));
    CHECK(full.value == Catch::Approx(reduced.delta).margin(1e-4));
  }
}
