#include <doctest.h>

#include <cmath>
#include <memory>

#include "itef/angular.hpp"
#include "oracles.hpp"

using namespace itef;
using doctest::Approx;

namespace {

CharRoot root_at(double w, int k) { return find_roots(w).real_roots_in(0.0, 1.0).at(k); }

}  // namespace

TEST_CASE("profile solves the clamped angular ODE") {
  const double w = 1.5 * kPi;
  for (int k : {0, 1}) {
    const AngularProfile p = solve_profile(root_at(w, k), w);
    CHECK(profile_ode_residual(p) < 1e-10);
    const Derivs a = p.derivs(0.0), b = p.derivs(w);
    CHECK(std::abs(a[0]) < 1e-12);
    CHECK(std::abs(a[1]) < 1e-12);
    CHECK(std::abs(b[0]) < 1e-12);
    CHECK(std::abs(b[1]) < 1e-12);
    CHECK(a[2] > 0.0);
    const double norm = oracle::simpson([&](double t) { return std::pow(p.derivs(t)[0], 2); }, 0.0, w);
    CHECK(norm == Approx(1.0).epsilon(1e-10));
    CHECK(p.norm_l2 == Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("profile derivatives agree with finite differences and the tables") {
  const double w = 1.5 * kPi;
  const AngularProfile p = solve_profile(root_at(w, 0), w, 101);
  REQUIRE(p.theta.size() == 101);
  const double h = 1e-5;
  for (double t : {0.3, 1.7, 4.0}) {
    for (int k = 1; k <= 4; ++k) {
      const double fd = (p.derivs(t + h)[k - 1] - p.derivs(t - h)[k - 1]) / (2 * h);
      CHECK(p.derivs(t)[k] == Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
  for (std::size_t i = 0; i < p.theta.size(); i += 10) {
    CHECK(p.phi[i] == Approx(p.derivs(p.theta[i])[0]).scale(1.0));
    CHECK(p.d2phi[i] == Approx(p.derivs(p.theta[i])[2]).scale(1.0));
  }
}

TEST_CASE("a point that is not a root has no clamped profile") {
  CharRoot fake;
  fake.z = {0.7, 0.0};
  fake.is_real = true;
  CHECK_THROWS_AS(solve_profile(fake, 1.5 * kPi), std::invalid_argument);
}

TEST_CASE("extraction constant matches its quadrature definition") {
  const double w = 1.5 * kPi;
  const AngularProfile p = solve_profile(root_at(w, 0), w);
  const double z = p.z();
  const double n0 = oracle::simpson([&](double t) { return std::pow(p.derivs(t)[0], 2); }, 0.0, w);
  const double n1 = oracle::simpson([&](double t) { return std::pow(p.derivs(t)[1], 2); }, 0.0, w);
  const double gamma = extraction_constant(z, p);
  CHECK(gamma == Approx(4 * z * (z * z - 1) * n0 - 4 * z * n1).epsilon(1e-9));
  CHECK(gamma == Approx(-2.89143688506).epsilon(1e-9));
}

TEST_CASE("eta1 is biharmonic and clamped") {
  const double w = 1.5 * kPi;
  const SectorDomain d = make_sector(w, 1.0, 0.45);
  const CharRoot z1 = root_at(w, 0);
  auto phi = std::make_shared<const AngularProfile>(solve_profile(z1, w));
  const DualSingular eta = eta1(d, z1, phi);
  CHECK(eta.exponent() == Approx(1.0 - z1.z.real()));
  for (double r : {0.01, 0.3, 0.9}) {
    for (double t : {0.2, 2.0, 4.5}) CHECK(eta.relative_bilaplacian(r, t) < 1e-10);
    CHECK(std::abs(eta.evaluate(r, 0.0).u) < 1e-12);
    CHECK(std::abs(eta.evaluate(r, w).ut) < 1e-10);
  }
  // r^{1-z} scaling
  CHECK(eta.evaluate(0.02, 1.0).u / eta.evaluate(0.01, 1.0).u == Approx(std::pow(2.0, 1.0 - z1.z.real())));
}

TEST_CASE("eta1 requires the smallest root of a non-convex sector beyond omega0") {
  const double w = 1.5 * kPi;
  const SectorDomain d = make_sector(w, 1.0, 0.45);
  const CharRoot z2 = root_at(w, 1);
  auto phi2 = std::make_shared<const AngularProfile>(solve_profile(z2, w));
  CHECK_THROWS_AS(eta1(d, z2, phi2), std::invalid_argument);
  const double w1 = 1.2 * kPi;
  const CharRoot z = root_at(w1, 0);
  auto phi = std::make_shared<const AngularProfile>(solve_profile(z, w1));
  CHECK_THROWS_AS(eta1(make_sector(w1, 1.0, 0.45), z, phi), std::invalid_argument);
}

TEST_CASE("associated profile exists at a double root and not at a simple one") {
  const auto [z, w] = oracle::double_root(1.40475, 1.7505067 * kPi);
  CharRoot dbl;
  dbl.z = {z, 0.0};
  dbl.is_real = true;
  dbl.multiplicity = 2;
  auto phi = std::make_shared<const AngularProfile>(solve_profile(dbl, w, 2001, 1e-6));
  const AssociatedProfile a = solve_associated(dbl, phi, w);
  CHECK(associated_ode_residual(a) < 1e-6);
  const double inner = oracle::simpson([&](double t) { return a.derivs(t)[0] * phi->derivs(t)[0]; }, 0.0, w);
  CHECK(std::abs(inner) < 1e-6);
  const Derivs e = a.derivs(w);
  CHECK(std::abs(e[0]) < 1e-8);
  CHECK(std::abs(e[1]) < 1e-6);

  const double ws = 1.5 * kPi;
  const CharRoot simple = root_at(ws, 0);
  auto ps = std::make_shared<const AngularProfile>(solve_profile(simple, ws));
  CHECK_THROWS_AS(solve_associated(simple, ps, ws), std::invalid_argument);
  CharRoot relabeled = simple;
  relabeled.multiplicity = 2;
  CHECK_THROWS_AS(solve_associated(relabeled, ps, ws), NumericalError);
}
