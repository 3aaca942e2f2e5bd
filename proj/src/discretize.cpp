#include "itef/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "itef/kernels.hpp"

namespace itef {

namespace {

double gegenbauer_norm(double lambda, int k) {
  // ∫ (1-x²)^{λ-1/2} (C_k^λ)² dx
  const double lg = std::log(kPi) + (1.0 - 2.0 * lambda) * std::log(2.0) +
                    std::lgamma(k + 2.0 * lambda) - std::lgamma(k + 1.0) -
                    std::log(k + lambda) - 2.0 * std::lgamma(lambda);
  return std::sqrt(std::exp(lg));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Jet bubble(BubbleFamily family, int k, const Jet& x) {
  const double lambda = family == BubbleFamily::Clamped ? 4.5 : 2.5;
  Jet c0(1.0), c1 = x * (2.0 * lambda);
  Jet c = k == 0 ? c0 : c1;
  for (int n = 2; n <= k; ++n) {
    c = (x * c1 * (2.0 * (n + lambda - 1.0)) - c0 * (n + 2.0 * lambda - 2.0)) * (1.0 / n);
    c0 = c1;
    c1 = c;
  }
  Jet w = 1.0 - x * x;
  if (family == BubbleFamily::Clamped) w = w * w;
  return w * c * (1.0 / gegenbauer_norm(lambda, k));
}

Jet RadialFn::jet(double r) const {
  if (kind == Kind::Bubble) {
    const Jet x = Jet::variable(r) * (2.0 / length) + (-1.0);
    return bubble(family, degree, x);
  }
  if (r >= cut_b) return Jet{};
  Jet v = Cutoff(cut_a, cut_b).jet(r) * Jet::power(r, exponent);
  if (log_power > 0) {
    const Jet l = log(Jet::variable(r));
    for (int k = 0; k < log_power; ++k) v = v * l;
  }
  return v;
}

std::string RadialFn::key() const {
  std::ostringstream os;
  if (kind == Kind::Bubble) {
    os << (family == BubbleFamily::Clamped ? "Rc" : "Rd") << degree << "/" << fmt(length);
  } else {
    os << "Rs" << fmt(exponent) << "L" << log_power << "[" << fmt(cut_a) << "," << fmt(cut_b) << "]";
  }
  return os.str();
}

Derivs AngularFn::derivs(double t) const {
  switch (kind) {
    case Kind::Bubble: {
      const Jet y = Jet::variable(t) * (2.0 / omega) + (-1.0);
      return bubble(family, degree, y).derivs();
    }
    case Kind::Profile:
      return profile->derivs(t);
    case Kind::Associated:
      return associated->derivs(t);
    case Kind::Sine: {
      const double f = frequency, s = std::sin(f * t), c = std::cos(f * t);
      return {s, f * c, -f * f * s, -f * f * f * c, f * f * f * f * s};
    }
  }
  return {};
}

std::string AngularFn::key() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Bubble:
      os << (family == BubbleFamily::Clamped ? "Tc" : "Td") << degree << "/" << fmt(omega);
      break;
    case Kind::Profile:
      os << "Tp" << fmt(profile->z());
      break;
    case Kind::Associated:
      os << "Ta" << fmt(associated->z()) << "N" << associated->nodes.size();
      break;
    case Kind::Sine:
      os << "Ts" << fmt(frequency);
      break;
  }
  return os.str();
}

namespace {

// Radial and angular derivatives at one point, each function evaluated at most once.
struct PointTables {
  const DiscreteSpace& s;
  double r, theta;
  std::vector<Derivs> rad, ang;
  std::vector<char> have_r, have_a;

  PointTables(const DiscreteSpace& sp, double r_, double t_)
      : s(sp), r(r_), theta(t_), rad(sp.radial.size()), ang(sp.angular.size()),
        have_r(sp.radial.size(), 0), have_a(sp.angular.size(), 0) {}

  FieldValue term(const Term& t) {
    if (!have_r[t.radial]) {
      const RadialFn& f = s.radial[t.radial];
      rad[t.radial] = r < f.support() ? f.derivs(r) : Derivs{};
      have_r[t.radial] = 1;
    }
    if (!have_a[t.angular]) {
      ang[t.angular] = s.angular[t.angular].derivs(theta);
      have_a[t.angular] = 1;
    }
    return separable_value(rad[t.radial], ang[t.angular], r);
  }
};

}  // namespace

FieldValue DiscreteSpace::evaluate(std::size_t i, double r, double theta) const {
  PointTables pt(*this, r, theta);
  FieldValue v;
  for (const Term& t : basis.at(i).terms) v.add(pt.term(t), t.coef);
  return v;
}

FieldValue DiscreteSpace::evaluate_field(const Eigen::VectorXd& x, double r, double theta) const {
  PointTables pt(*this, r, theta);
  FieldValue v;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (x(i) == 0.0) continue;
    for (const Term& t : basis[i].terms) v.add(pt.term(t), x(i) * t.coef);
  }
  return v;
}

std::string DiscreteSpace::key() const {
  std::ostringstream os;
  os << "omega=" << fmt(domain.omega) << ";R=" << fmt(domain.radius) << ";chi=" << fmt(domain.cutoff_inner)
     << "," << fmt(domain.cutoff_outer) << ";nr=" << n_r << ";nt=" << n_theta
     << ";dir=" << dirichlet << ";basis=";
  for (const auto& b : basis) {
    os << "{";
    for (const auto& t : b.terms) {
      os << radial[t.radial].key() << "*" << angular[t.angular].key() << "*" << fmt(t.coef) << ";";
    }
    os << "}";
  }
  return os.str();
}

std::vector<CharRoot> default_enrichment(double omega) {
  if (omega < kPi) return {};
  return find_roots(omega).real_roots_in(0.0, 1.0);
}

namespace {

// Replaces each enrichment member e by e - P e, P the L² projection onto the tensor block,
// then checks the diagonally scaled mass matrix of the result.
void orthogonalize_enrichment(DiscreteSpace& s, const QuadratureOptions& opt) {
  const PolarQuadrature q = make_quadrature(s.domain, opt);
  const Matrices m = assemble_factorized(s, tabulate(s, q));
  const Eigen::Index ns = static_cast<Eigen::Index>(s.smooth_dimension());
  const Eigen::Index ne = m.M.rows() - ns;
  Eigen::MatrixXd g = m.M;
  if (ne > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(m.M.topLeftCorner(ns, ns));
    if (llt.info() != Eigen::Success) throw NumericalError("tensor mass matrix is not positive definite");
    const Eigen::MatrixXd p = llt.solve(m.M.topRightCorner(ns, ne));
    for (Eigen::Index k = 0; k < ne; ++k) {
      auto& terms = s.basis[ns + k].terms;
      for (Eigen::Index i = 0; i < ns; ++i) {
        const Term& t = s.basis[i].terms.front();
        terms.push_back({t.radial, t.angular, -p(i, k)});
      }
    }
    Eigen::MatrixXd tr = Eigen::MatrixXd::Identity(ns + ne, ns + ne);
    tr.topRightCorner(ns, ne) = -p;
    g = tr.transpose() * m.M * tr;
  }
  const Eigen::VectorXd d = g.diagonal().cwiseSqrt().cwiseInverse();
  g = d.asDiagonal() * g * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  s.gram_ratio = ev(0) / ev(ev.size() - 1);
  if (!(s.gram_ratio > 1e-12)) {
    throw NumericalError("Gram conditioning failure (min/max eigenvalue " + fmt(s.gram_ratio) +
                         "): reduce enrichment overlap or raise quadrature order");
  }
}

void add_tensor(DiscreteSpace& s, BubbleFamily family) {
  for (int i = 0; i < s.n_r; ++i) {
    RadialFn f;
    f.family = family;
    f.degree = i;
    f.length = s.domain.radius;
    s.radial.push_back(f);
  }
  for (int j = 0; j < s.n_theta; ++j) {
    AngularFn g;
    g.family = family;
    g.degree = j;
    g.omega = s.domain.omega;
    s.angular.push_back(g);
  }
  for (int i = 0; i < s.n_r; ++i) {
    for (int j = 0; j < s.n_theta; ++j) {
      BasisFunction b;
      b.terms.push_back({i, j, 1.0});
      b.label = "R" + std::to_string(i) + "T" + std::to_string(j);
      s.basis.push_back(b);
    }
  }
}

int add_radial(DiscreteSpace& s, double exponent, int log_power) {
  RadialFn f;
  f.kind = RadialFn::Kind::Singular;
  f.length = s.domain.radius;
  f.exponent = exponent;
  f.log_power = log_power;
  f.cut_a = s.domain.cutoff_inner;
  f.cut_b = s.domain.cutoff_outer;
  s.radial.push_back(f);
  return static_cast<int>(s.radial.size()) - 1;
}

int add_angular(DiscreteSpace& s, AngularFn g) {
  g.omega = s.domain.omega;
  s.angular.push_back(std::move(g));
  return static_cast<int>(s.angular.size()) - 1;
}

}  // namespace

DiscreteSpace build_space(const SectorDomain& d, int n_r, int n_theta,
                          const std::vector<CharRoot>& enrich, const QuadratureOptions& opt) {
  if (n_r < 4 || n_theta < 4) throw std::invalid_argument("build_space: n_r and n_theta must be >= 4");
  for (const auto& r : enrich) {
    if (!r.is_real || !(r.z.real() > 0.0 && r.z.real() < 2.0)) {
      throw std::invalid_argument("build_space: enrichment roots must be real with Re z in (0, 2)");
    }
  }
  DiscreteSpace s;
  s.domain = d;
  s.n_r = n_r;
  s.n_theta = n_theta;
  s.enrichment = enrich;
  add_tensor(s, BubbleFamily::Clamped);

  for (const auto& root : enrich) {
    const double z = root.z.real();
    auto phi = std::make_shared<const AngularProfile>(solve_profile(root, d.omega));
    AngularFn pf;
    pf.kind = AngularFn::Kind::Profile;
    pf.profile = phi;
    const int t0 = add_angular(s, pf);
    int t1 = -1;
    double hat_scale = 0.0;
    if (root.multiplicity == 2) {
      auto hat = std::make_shared<const AssociatedProfile>(solve_associated(root, phi, d.omega));
      AngularFn af;
      af.kind = AngularFn::Kind::Associated;
      af.associated = hat;
      t1 = add_angular(s, af);
      hat_scale = 1.0 / hat->forcing_scale;
    }
    const int a0 = add_radial(s, 1.0 + z, 0);
    BasisFunction b;
    b.terms.push_back({a0, t0, 1.0});
    b.enriched = true;
    b.label = "sing z=" + fmt(z);
    s.basis.push_back(b);
    if (t1 >= 0) {
      BasisFunction bl;
      bl.terms.push_back({add_radial(s, 1.0 + z, 1), t0, 1.0});
      bl.terms.push_back({a0, t1, hat_scale});
      bl.enriched = true;
      bl.label = "sing-log z=" + fmt(z);
      s.basis.push_back(bl);
    }
  }
  orthogonalize_enrichment(s, opt);
  return s;
}

DiscreteSpace build_dirichlet_space(const SectorDomain& d, int n_r, int n_theta,
                                    const QuadratureOptions& opt) {
  if (n_r < 1 || n_theta < 1) throw std::invalid_argument("build_dirichlet_space: empty basis");
  DiscreteSpace s;
  s.domain = d;
  s.n_r = n_r;
  s.n_theta = n_theta;
  s.dirichlet = true;
  add_tensor(s, BubbleFamily::Dirichlet);
  const double nu = kPi / d.omega;
  if (std::abs(nu - std::round(nu)) > 1e-9) {
    AngularFn g;
    g.kind = AngularFn::Kind::Sine;
    g.frequency = nu;
    BasisFunction b;
    b.terms.push_back({add_radial(s, nu, 0), add_angular(s, g), 1.0});
    b.enriched = true;
    b.label = "dirichlet-sing nu=" + fmt(nu);
    s.basis.push_back(b);
  }
  orthogonalize_enrichment(s, opt);
  return s;
}

OperatorBundle assemble(std::shared_ptr<const DiscreteSpace> space, const PolarQuadrature& q) {
  if (!space) throw std::invalid_argument("assemble: missing space");
  Matrices m = assemble_factorized(*space, tabulate(*space, q));
  OperatorBundle b;
  b.A = std::move(m.A);
  b.S = std::move(m.S);
  b.M = std::move(m.M);
  b.space = std::move(space);
  b.quadrature = q;
  b.enriched = b.space->dimension() > b.space->smooth_dimension();
  return b;
}

QuadratureCheck check_quadrature_convergence(std::shared_ptr<const DiscreteSpace> space,
                                             const QuadratureOptions& opt, double tol) {
  QuadratureOptions fine = opt;
  fine.radial_order *= 2;
  fine.angular_order *= 2;
  const Matrices a = assemble_factorized(*space, tabulate(*space, make_quadrature(space->domain, opt)));
  const Matrices b = assemble_factorized(*space, tabulate(*space, make_quadrature(space->domain, fine)));
  QuadratureCheck c;
  for (const auto* pair : {&a.A, &a.S, &a.M}) {
    const Eigen::MatrixXd& x = *pair;
    const Eigen::MatrixXd& y = pair == &a.A ? b.A : (pair == &a.S ? b.S : b.M);
    const Eigen::VectorXd dg = y.diagonal().cwiseAbs().cwiseSqrt();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double s = dg(i) * dg(j);
        if (s > 0.0) c.max_change = std::max(c.max_change, std::abs(x(i, j) - y(i, j)) / s);
      }
    }
  }
  c.converged = c.max_change < tol;
  return c;
}

Eigen::VectorXd load_vector(const OperatorBundle& b, const Source& f) {
  const PolarQuadrature& q = b.quadrature;
  std::vector<double> samples(q.size());
  for (std::size_t ir = 0; ir < q.radial.size(); ++ir) {
    for (std::size_t it = 0; it < q.angular.size(); ++it) {
      samples[q.index(ir, it)] = f(q.radial.nodes[ir], q.angular.nodes[it]);
    }
  }
  return project(*b.space, tabulate(*b.space, q), samples);
}

Eigen::VectorXd solve_clamped_biharmonic(const OperatorBundle& b, const Eigen::VectorXd& load) {
  if (load.size() != b.A.rows()) throw std::invalid_argument("load vector has the wrong size");
  const double nl = load.norm();
  if (nl == 0.0) return Eigen::VectorXd::Zero(load.size());
  Eigen::LLT<Eigen::MatrixXd> llt(b.A);
  if (llt.info() != Eigen::Success) throw NumericalError("singular A: Cholesky failed");
  Eigen::VectorXd x = llt.solve(load);
  // One step of iterative refinement.
  x += llt.solve(load - b.A * x);
  const double res = (b.A * x - load).norm() / nl;
  if (!(res < 1e-10)) {
    throw NumericalError("clamped solve residual " + fmt(res) + " exceeds 1e-10");
  }
  return x;
}

Eigen::VectorXd solve_clamped_biharmonic(const OperatorBundle& b, const Source& f) {
  return solve_clamped_biharmonic(b, load_vector(b, f));
}

double dirichlet_lambda1(const SectorDomain& d, int n_r, int n_theta, const QuadratureOptions& opt) {
  if (n_r < 8 || n_theta < 8) throw std::invalid_argument("dirichlet_lambda1: resolution must be >= 8x8");
  const DiscreteSpace s = build_dirichlet_space(d, n_r, n_theta, opt);
  const Matrices m = assemble_factorized(s, tabulate(s, make_quadrature(d, opt)));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(m.S, m.M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("dirichlet_lambda1: eigensolver failed");
  return es.eigenvalues()(0);
}

}  // namespace itef
