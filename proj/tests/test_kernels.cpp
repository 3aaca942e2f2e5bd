#include <doctest.h>

#include <memory>

#include "itef/discretize.hpp"
#include "itef/kernels.hpp"

using namespace itef;

TEST_CASE("factorized assembly agrees with the pointwise reference") {
  const SectorDomain d = make_sector(1.5 * kPi, 1.0, 0.45);
  QuadratureOptions opt;
  opt.panels = 12;
  opt.radial_order = 12;
  opt.angular_order = 24;
  const DiscreteSpace s = build_space(d, 5, 4, default_enrichment(d.omega), opt);
  const PolarQuadrature q = make_quadrature(d, opt);
  const Matrices fast = assemble_factorized(s, tabulate(s, q));
  const Matrices ref = assemble_reference(s, q);
  CHECK((fast.A - ref.A).cwiseAbs().maxCoeff() <= 1e-12 * ref.A.cwiseAbs().maxCoeff());
  CHECK((fast.S - ref.S).cwiseAbs().maxCoeff() <= 1e-12 * ref.S.cwiseAbs().maxCoeff());
  CHECK((fast.M - ref.M).cwiseAbs().maxCoeff() <= 1e-12 * ref.M.cwiseAbs().maxCoeff());
}

TEST_CASE("sampled fields agree with the reference and with point evaluation") {
  const SectorDomain d = make_sector(1.2 * kPi, 1.0, 0.45);
  QuadratureOptions opt;
  opt.panels = 10;
  opt.radial_order = 8;
  opt.angular_order = 16;
  const DiscreteSpace s = build_space(d, 6, 5, default_enrichment(d.omega), opt);
  const PolarQuadrature q = make_quadrature(d, opt);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(s.dimension(), 2.0, -1.0);
  const auto fast = sample_field(s, tabulate(s, q), x);
  const auto ref = sample_field_reference(s, q, x);
  REQUIRE(fast.size() == q.size());
  for (std::size_t i = 0; i < q.radial.size(); i += 7) {
    for (std::size_t j = 0; j < q.angular.size(); j += 5) {
      const std::size_t k = q.index(i, j);
      const FieldValue p = s.evaluate_field(x, q.radial.nodes[i], q.angular.nodes[j]);
      CHECK(fast[k].u == doctest::Approx(ref[k].u).scale(1.0));
      CHECK(fast[k].lap == doctest::Approx(ref[k].lap).scale(1.0));
      CHECK(fast[k].bilap == doctest::Approx(p.bilap).epsilon(1e-10).scale(1.0));
      CHECK(fast[k].ur == doctest::Approx(p.ur).scale(1.0));
    }
  }
}

TEST_CASE("projection is the transpose of sampling") {
  const SectorDomain d = make_sector(0.5 * kPi, 1.0, 0.45);
  const DiscreteSpace s = build_space(d, 5, 5, {});
  const PolarQuadrature q = make_quadrature(d);
  const NodeTables t = tabulate(s, q);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(s.dimension(), 0.5, 1.5);
  const auto f = sample_field(s, t, x);
  std::vector<double> u(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) u[k] = f[k].u;
  const Matrices m = assemble_factorized(s, t);
  CHECK((project(s, t, u) - m.M * x).norm() < 1e-12 * (m.M * x).norm());
}
