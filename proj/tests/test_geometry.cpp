#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "itef/geometry.hpp"
#include "oracles.hpp"

using namespace itef;
using doctest::Approx;

TEST_CASE("make_sector rejects degenerate and invalid parameters") {
  CHECK_THROWS_AS(make_sector(0.0, 1.0, 0.45), std::invalid_argument);
  CHECK_THROWS_AS(make_sector(kPi, 1.0, 0.45), std::invalid_argument);
  CHECK_THROWS_AS(make_sector(2 * kPi, 1.0, 0.45), std::invalid_argument);
  CHECK_THROWS_AS(make_sector(7.0, 1.0, 0.45), std::invalid_argument);
  CHECK_THROWS_AS(make_sector(1.5 * kPi, -1.0, 0.45), std::invalid_argument);
  CHECK_THROWS_AS(make_sector(1.5 * kPi, 1.0, 0.5), std::invalid_argument);

  const SectorDomain d = make_sector(1.5 * kPi, 2.0, 0.45);
  CHECK(d.cutoff_inner == Approx(0.225));
  CHECK(d.cutoff_outer == Approx(0.9));
  CHECK(d.area() == Approx(0.5 * 1.5 * kPi * 4.0));
  CHECK_FALSE(d.convex());
  CHECK(make_sector(0.5 * kPi, 1.0, 0.45).convex());
}

TEST_CASE("cutoff is 1 on the plateau, 0 past the support, flat at both ends") {
  const Cutoff c(0.2, 0.8);
  CHECK(c.eval(0.0) == 1.0);
  CHECK(c.eval(0.2) == 1.0);
  CHECK(c.eval(0.8) == 0.0);
  CHECK(c.eval(5.0) == 0.0);
  for (int k = 1; k <= 4; ++k) {
    CHECK(std::abs(c.eval(0.2 + 1e-9, k)) < 1e-6);
    CHECK(std::abs(c.eval(0.8 - 1e-9, k)) < 1e-6);
  }
  CHECK(c.eval(0.5) == Approx(0.5));
  double prev = 1.0;
  for (int i = 1; i < 200; ++i) {
    const double v = c.eval(0.2 + 0.6 * i / 200.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("cutoff derivatives match finite differences") {
  const Cutoff c(0.225, 0.9);
  const double h = 1e-5;
  for (double r : {0.3, 0.45, 0.6, 0.85}) {
    for (int k = 1; k <= 4; ++k) {
      const double fd = (c.eval(r + h, k - 1) - c.eval(r - h, k - 1)) / (2 * h);
      CHECK(c.eval(r, k) == Approx(fd).epsilon(1e-5).scale(1.0));
    }
    CHECK(c.jet(r).derivs()[2] == Approx(c.eval(r, 2)));
  }
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  const Rule1D g = gauss_legendre(8, 0.0, 2.0);
  CHECK(g.size() == 8);
  for (int p = 0; p <= 15; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
    CHECK(s == Approx(std::pow(2.0, p + 1) / (p + 1)).epsilon(1e-13));
  }
}

TEST_CASE("polar quadrature integrates area and singular radial powers") {
  const SectorDomain d = make_sector(1.5 * kPi, 1.0, 0.45);
  const PolarQuadrature q = make_quadrature(d);
  double area = 0.0, sing = 0.0;
  const double a = -0.9;  // |Δ(r^{1+z}φ)|² ~ r^{2z-2}, z ≈ 0.54
  for (std::size_t i = 0; i < q.radial.size(); ++i) {
    for (std::size_t j = 0; j < q.angular.size(); ++j) {
      area += q.weight(i, j);
      sing += q.weight(i, j) * std::pow(q.radial.nodes[i], a);
    }
  }
  CHECK(area == Approx(d.area()).epsilon(1e-13));
  CHECK(sing == Approx(d.omega / (a + 2.0)).epsilon(1e-12));
  CHECK_FALSE(q.signature.empty());
}

TEST_CASE("graded radial rule has a breakpoint at each band end") {
  QuadratureOptions opt;
  opt.panels = 10;
  const Rule1D r = graded_radial_rule(1.0, opt, 0.225, 0.9);
  double s = 0.0, s_band = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    s += r.weights[i];
    if (r.nodes[i] > 0.225 && r.nodes[i] < 0.9) s_band += r.weights[i];
  }
  CHECK(s == Approx(1.0).epsilon(1e-14));
  CHECK(s_band == Approx(0.675).epsilon(1e-14));
}

TEST_CASE("corner quadrature covers the disc piece of radius eps") {
  const SectorDomain d = make_sector(0.5 * kPi, 1.0, 0.45);
  for (double eps : {0.5, 0.125, 0.01}) {
    const PolarQuadrature q = make_corner_quadrature(d, eps);
    double area = 0.0, rmax = 0.0;
    for (std::size_t i = 0; i < q.radial.size(); ++i) {
      rmax = std::max(rmax, q.radial.nodes[i]);
      for (std::size_t j = 0; j < q.angular.size(); ++j) area += q.weight(i, j);
    }
    CHECK(area == Approx(0.5 * d.omega * eps * eps).epsilon(1e-13));
    CHECK(rmax < eps);
  }
}

TEST_CASE("weighted norm of r^p matches the closed form") {
  const SectorDomain d = make_sector(0.5 * kPi, 1.0, 0.45);
  const PolarQuadrature q = make_quadrature(d);
  PolarSamples s;
  s.quadrature = &q;
  const double p = 2.5;
  std::vector<double> u(q.size()), ur(q.size()), ut(q.size(), 0.0);
  for (std::size_t i = 0; i < q.radial.size(); ++i) {
    for (std::size_t j = 0; j < q.angular.size(); ++j) {
      u[q.index(i, j)] = std::pow(q.radial.nodes[i], p);
      ur[q.index(i, j)] = p * std::pow(q.radial.nodes[i], p - 1);
    }
  }
  s.set(0, 0, u);
  CHECK_THROWS_AS(weighted_norm(s, 1, 0.0), std::invalid_argument);
  s.set(1, 0, ur);
  s.set(0, 1, ut);
  // V^1_0: ||r^{-1} u||² + ||∂_r u||² + ||∂_θ u||²
  const double exact = d.omega * (1.0 + p * p) / (2.0 * p);
  CHECK(weighted_norm(s, 1, 0.0) == Approx(std::sqrt(exact)).epsilon(1e-12));
}
