#include <doctest.h>

#include <cmath>
#include <random>

#include "itef/charroots.hpp"
#include "itef/geometry.hpp"
#include "oracles.hpp"

using namespace itef;
using doctest::Approx;

TEST_CASE("determinant equals the closed form up to the (z²-1) factor") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> re(0.01, 1.99), im(-3.0, 3.0), om(0.1, 6.2);
  for (int k = 0; k < 500; ++k) {
    const cplx z(re(rng), im(rng));
    const double w = om(rng);
    const cplx lhs = -(z * z - 1.0) / 4.0 * char_det(z, w);
    CHECK(std::abs(lhs - closed_form_char(z, w)) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("degenerate evaluation is continuous across the switch at z = 1") {
  const double w = 1.5 * kPi;
  for (double dz : {2e-3, 9e-4, 1e-5, 0.0}) {
    const cplx z(1.0 + dz, 0.01);
    CHECK(std::abs(char_det_degenerate(z, w) - char_det(z, w)) <= 1e-9 * std::abs(char_det(z, w)) + 1e-12);
  }
  const cplx z(1.0 + 2e-3, 0.0);
  CHECK(std::abs(char_det_degenerate(z, w) - char_matrix(z, w).determinant()) < 1e-8);
}

TEST_CASE("determinant derivative matches finite differences") {
  const double w = 1.3 * kPi;
  const cplx z(0.7, 0.2), h(1e-6, 0.0);
  const cplx fd = (char_det(z + h, w) - char_det(z - h, w)) / (2.0 * h);
  CHECK(std::abs(char_det_derivative(z, w, 1) - fd) < 1e-6 * std::abs(fd));
  const cplx fd2 = (char_det_derivative(z + h, w, 1) - char_det_derivative(z - h, w, 1)) / (2.0 * h);
  CHECK(std::abs(char_det_derivative(z, w, 2) - fd2) < 1e-6 * std::abs(fd2));
  CHECK(std::abs(char_det_derivative(z, w, 0) - char_det(z, w)) < 1e-14 * std::abs(char_det(z, w)));
}

TEST_CASE("omega0 is the root of tan w = w in (pi, 3pi/2)") {
  const OmegaThreshold t = compute_omega0();
  CHECK(t.omega0 == Approx(oracle::tan_fixed_point_bisection()).epsilon(1e-14));
  CHECK(t.omega0 == Approx(4.493409457909064).epsilon(1e-14));
  CHECK(t.residual < 1e-12);
}

TEST_CASE("three-quarter sector: two real simple roots in (0, 1)") {
  const RootSearchResult r = find_roots(1.5 * kPi);
  const auto real = r.real_roots_in(0.0, 1.0);
  REQUIRE(real.size() == 2);
  CHECK(real[0].z.real() == Approx(0.544483736782).epsilon(1e-11));
  CHECK(real[1].z.real() == Approx(0.908529189846).epsilon(1e-11));
  for (const auto& z : real) {
    CHECK(z.multiplicity == 1);
    CHECK(z.is_real);
    CHECK(z.residual < 1e-10);
    CHECK(std::abs(closed_form_char(z.z, 1.5 * kPi)) < 1e-12);
  }
  CHECK(r.winding_count == r.count_with_multiplicity());
  // the remaining strip roots are a conjugate pair
  int complex_roots = 0;
  for (const auto& z : r.roots) complex_roots += !z.is_real;
  CHECK(complex_roots == 2);
}

TEST_CASE("roots come out in increasing real part and satisfy the determinant") {
  for (double w : {1.1 * kPi, 1.4 * kPi, 1.7 * kPi, 1.95 * kPi, 0.6 * kPi}) {
    const RootSearchResult r = find_roots(w);
    CHECK(r.winding_count == r.count_with_multiplicity());
    for (std::size_t i = 0; i < r.roots.size(); ++i) {
      CHECK(r.roots[i].residual < 1e-10);
      CHECK(r.roots[i].z.real() > 0.0);
      CHECK(r.roots[i].z.real() < 2.0);
      if (i) CHECK(r.roots[i].z.real() >= r.roots[i - 1].z.real() - 1e-12);
    }
  }
}

TEST_CASE("below omega0 the root in (0, 1) is real and simple") {
  for (double w : {1.05 * kPi, 190.0 * kPi / 180.0, 1.3 * kPi}) {
    const auto real = find_roots(w).real_roots_in(0.0, 1.0);
    REQUIRE(real.size() == 1);
    CHECK(real[0].multiplicity == 1);
    CHECK(real[0].derivative_residual > 1e-3);
  }
}

TEST_CASE("convex sectors have no root in (0, 1)") {
  for (double w : {0.25 * kPi, 0.5 * kPi, 0.9 * kPi}) CHECK(find_roots(w).real_roots_in(0.0, 1.0).empty());
}

TEST_CASE("a real double root is classified with multiplicity 2") {
  const auto [z, w] = oracle::double_root(1.40475, 1.7505067 * kPi);
  CHECK(z == Approx(1.4047498678).epsilon(1e-8));
  const RootSearchResult r = find_roots(w);
  CHECK(r.winding_count == r.count_with_multiplicity());
  bool found = false;
  for (const auto& c : r.roots) {
    if (std::abs(c.z - cplx(z, 0.0)) < 1e-5) {
      found = true;
      CHECK(c.multiplicity == 2);
      CHECK(c.is_real);
    }
  }
  CHECK(found);
}

TEST_CASE("seeded contour perturbation gives the same roots") {
  RootSearchOptions a, b;
  a.seed = 1;
  b.seed = 99;
  const auto ra = find_roots(1.5 * kPi, a), rb = find_roots(1.5 * kPi, b);
  REQUIRE(ra.roots.size() == rb.roots.size());
  for (std::size_t i = 0; i < ra.roots.size(); ++i) CHECK(std::abs(ra.roots[i].z - rb.roots[i].z) < 1e-12);
}
