#include "itef/corner.hpp"

#include <algorithm>
#include <cmath>

#include "itef/kernels.hpp"

namespace itef {

namespace {

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> zeta_samples(const DualField& zf, const PolarQuadrature& q) {
  const auto h = sample_field(*zf.space, tabulate(*zf.space, q), zf.h);
  std::vector<Derivs> ang(q.angular.size());
  for (std::size_t it = 0; it < q.angular.size(); ++it) ang[it] = zf.profile->derivs(q.angular.nodes[it]);
  std::vector<double> out(q.size());
  for (std::size_t ir = 0; ir < q.radial.size(); ++ir) {
    const double r = q.radial.nodes[ir];
    const Derivs rd = r < zf.chi_radial.support() ? zf.chi_radial.derivs(r) : Derivs{};
    for (std::size_t it = 0; it < q.angular.size(); ++it) {
      out[q.index(ir, it)] = rd[0] * ang[it][0] + h[q.index(ir, it)].u;
    }
  }
  return out;
}

double dual_norm(const Eigen::LLT<Eigen::MatrixXd>& a, const Eigen::VectorXd& f) {
  return std::sqrt(std::max(0.0, f.dot(a.solve(f))));
}

}  // namespace

FieldValue DualField::chi_eta(double r, double theta) const {
  if (r >= chi_radial.support()) return {};
  return separable_value(chi_radial.derivs(r), profile->derivs(theta), r);
}

FieldValue DualField::evaluate(double r, double theta) const {
  FieldValue v = chi_eta(r, theta);
  v.add(space->evaluate_field(h, r, theta), 1.0);
  return v;
}

double DualField::source(double r, double theta) const {
  if (r <= chi_radial.cut_a || r >= chi_radial.cut_b) return 0.0;
  return -chi_eta(r, theta).bilap;
}

DualField build_zeta1(const OperatorBundle& b, const DualSingular& eta) {
  const SectorDomain& d = b.space->domain;
  DualField zf;
  zf.space = b.space;
  zf.profile = eta.profile_ptr();
  zf.chi_radial.kind = RadialFn::Kind::Singular;
  zf.chi_radial.exponent = eta.exponent();
  zf.chi_radial.length = d.radius;
  zf.chi_radial.cut_a = d.cutoff_inner;
  zf.chi_radial.cut_b = d.cutoff_outer;
  const Eigen::VectorXd load =
      load_vector(b, [&zf](double r, double t) { return zf.source(r, t); });
  if (!load.allFinite()) throw NumericalError("build_zeta1: commutator source quadrature failed");
  zf.h = solve_clamped_biharmonic(b, load);
  zf.residual = (b.A * zf.h - load).norm() / std::max(load.norm(), 1e-300);
  return zf;
}

double zeta1_residual(const DualField& zf, const OperatorBundle& reference) {
  const PolarQuadrature& q = reference.quadrature;
  const DiscreteSpace& fs = *reference.space;
  const auto h = sample_field(*zf.space, tabulate(*zf.space, q), zf.h);
  std::vector<double> u(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) u[k] = h[k].u;
  const NodeTables tf = tabulate(fs, q);
  const Eigen::VectorXd x = reference.M.llt().solve(project(fs, tf, u));
  const Eigen::VectorXd load = load_vector(reference, [&zf](double r, double t) { return zf.source(r, t); });
  const Eigen::LLT<Eigen::MatrixXd> a(reference.A);
  return dual_norm(a, reference.A * x - load) / dual_norm(a, load);
}

double pair_with_zeta1(const DualField& zf, const PolarQuadrature& q, const std::vector<double>& f) {
  if (f.size() != q.size()) throw std::invalid_argument("pair_with_zeta1: sample count mismatch");
  const std::vector<double> z = zeta_samples(zf, q);
  double s = 0.0;
  for (std::size_t ir = 0; ir < q.radial.size(); ++ir) {
    for (std::size_t it = 0; it < q.angular.size(); ++it) {
      const std::size_t k = q.index(ir, it);
      s += q.weight(ir, it) * z[k] * f[k];
    }
  }
  return s;
}

FunctionalValue singular_functional(const OperatorBundle& b, const ItefMode& mode,
                                    const DualField& zf, const PolarQuadrature& q) {
  const auto psi = sample_field(*b.space, tabulate(*b.space, q), mode.psi);
  const std::vector<double> z = zeta_samples(zf, q);
  double f = 0, zz = 0, gg = 0;
  for (std::size_t ir = 0; ir < q.radial.size(); ++ir) {
    for (std::size_t it = 0; it < q.angular.size(); ++it) {
      const std::size_t k = q.index(ir, it);
      const double w = q.weight(ir, it);
      const double g = mode.lambda_tilde * psi[k].u - mode.kappa_tilde * psi[k].lap;
      f += w * z[k] * g;
      zz += w * z[k] * z[k];
      gg += w * g * g;
    }
  }
  return {f, std::sqrt(zz * gg)};
}

double enrichment_coefficient(const DiscreteSpace& space, const Eigen::VectorXd& x, double z) {
  for (std::size_t i = space.smooth_dimension(); i < space.dimension(); ++i) {
    const BasisFunction& b = space.basis[i];
    if (!b.enriched || b.terms.empty()) continue;
    const RadialFn& r = space.radial[b.terms.front().radial];
    if (r.kind == RadialFn::Kind::Singular && r.log_power == 0 &&
        std::abs(r.exponent - (1.0 + z)) < 1e-9) {
      return x(static_cast<Eigen::Index>(i));
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double c1_radial_fit(const PointField& lap, const AngularProfile& phi, double lo, double hi) {
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("c1_radial_fit: bad window");
  const double z = phi.z();
  const Rule1D ang = gauss_legendre(64, 0.0, phi.omega);
  const int nr = 24;
  double num = 0, den = 0;
  for (int k = 0; k < nr; ++k) {
    const double r = lo * std::pow(hi / lo, static_cast<double>(k) / (nr - 1));
    for (std::size_t j = 0; j < ang.size(); ++j) {
      const Derivs p = phi.derivs(ang.nodes[j]);
      const double g = std::pow(r, z - 1.0) * ((1.0 + z) * (1.0 + z) * p[0] + p[2]);
      num += ang.weights[j] * lap(r, ang.nodes[j]) * g;
      den += ang.weights[j] * g * g;
    }
  }
  return num / den;
}

C1Estimate extract_c1(const OperatorBundle& b, const ItefMode& mode, const DualField& zf,
                      double gamma, std::pair<double, double> window, double rel_tol) {
  C1Estimate e;
  e.gamma = gamma;
  e.functional = singular_functional(b, mode, zf, b.quadrature);
  if (!e.functional.nonzero(rel_tol)) {
    throw CriterionInconclusive("criterion inconclusive: |F| = " + std::to_string(std::abs(e.functional.F)) +
                                " below tolerance");
  }
  e.c1_pairing = -e.functional.F / gamma;
  e.c1_fit = enrichment_coefficient(*b.space, mode.psi, zf.z1());
  if (std::isnan(e.c1_fit)) {
    const double R = b.space->domain.radius;
    e.c1_fit = c1_radial_fit(
        [&](double r, double t) { return b.space->evaluate_field(mode.psi, r, t).lap; },
        *zf.profile, window.first * R, window.second * R);
  }
  return e;
}

BlowupFit blowup_fit(const PointField& field, const SectorDomain& d, std::pair<double, double> window,
                     const std::function<double(double)>& predicted, int radial_points,
                     int angular_points) {
  if (!(window.first > 0.0 && window.second > window.first) || radial_points < 2) {
    throw std::invalid_argument("blowup_fit: bad window");
  }
  const Rule1D ang = gauss_legendre(angular_points, 0.0, d.omega);
  std::vector<double> lr, lm, radii;
  std::vector<std::vector<double>> vals;
  for (int k = 0; k < radial_points; ++k) {
    const double r = d.radius * window.first *
                     std::pow(window.second / window.first, static_cast<double>(k) / (radial_points - 1));
    std::vector<double> row(ang.size());
    double m = 0.0;
    for (std::size_t j = 0; j < ang.size(); ++j) {
      row[j] = field(r, ang.nodes[j]);
      m += ang.weights[j] * std::abs(row[j]);
    }
    m /= d.omega;
    if (!(m > 1e-300) || !std::isfinite(m)) {
      throw NumericalError("blowup_fit: field indistinguishable from 0 on the window");
    }
    radii.push_back(r);
    lr.push_back(std::log(r));
    lm.push_back(std::log(m));
    vals.push_back(std::move(row));
  }
  BlowupFit out;
  out.alpha = -slope(lr, lm);
  double mean_lr = 0, mean_lm = 0;
  for (std::size_t k = 0; k < lr.size(); ++k) {
    mean_lr += lr[k];
    mean_lm += lm[k];
  }
  out.prefactor = std::exp((mean_lm + out.alpha * mean_lr) / lr.size());
  out.correlation = std::numeric_limits<double>::quiet_NaN();
  if (predicted) {
    double cp = 0, cc = 0, pp = 0, den = 0;
    for (double r : radii) den += std::pow(r, -2.0 * out.alpha);
    for (std::size_t j = 0; j < ang.size(); ++j) {
      double c = 0.0;
      for (std::size_t k = 0; k < radii.size(); ++k) c += vals[k][j] * std::pow(radii[k], -out.alpha);
      c /= den;
      const double p = predicted(ang.nodes[j]);
      cp += ang.weights[j] * c * p;
      cc += ang.weights[j] * c * c;
      pp += ang.weights[j] * p * p;
    }
    out.correlation = std::abs(cp) / std::sqrt(cc * pp);
  }
  return out;
}

std::function<double(double)> laplacian_profile(std::shared_ptr<const AngularProfile> phi) {
  return [phi](double t) {
    const double z = phi->z();
    const Derivs p = phi->derivs(t);
    return (1.0 + z) * (1.0 + z) * p[0] + p[2];
  };
}

PairSamples sample_pair(const DiscreteSpace& space, const ItefMode& mode, const PolarQuadrature& q) {
  if (!mode.synthesized) throw std::invalid_argument("sample_pair: mode not synthesized");
  const auto f = sample_field(space, tabulate(space, q), mode.psi);
  PairSamples s;
  s.v.resize(q.size());
  s.w.resize(q.size());
  s.psi.resize(q.size());
  s.psi_lap.resize(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    s.psi[k] = f[k].u;
    s.psi_lap[k] = f[k].lap;
    s.v[k] = mode.lap_coef * f[k].lap + mode.v_psi * f[k].u;
    s.w[k] = mode.lap_coef * f[k].lap + mode.w_psi * f[k].u;
  }
  return s;
}

VanishingTable convex_vanishing(const OperatorBundle& b, const ItefMode& mode,
                                const std::vector<double>& eps_list, const QuadratureOptions& opt) {
  const SectorDomain& d = b.space->domain;
  if (!d.convex()) throw std::invalid_argument("convex_vanishing: requires omega < pi");
  if (!mode.synthesized) throw std::invalid_argument("convex_vanishing: mode not synthesized");
  if (eps_list.empty()) throw std::invalid_argument("convex_vanishing: no radii");
  const double finest = d.radius * std::pow(opt.grading, opt.panels - 4);
  VanishingTable t;
  for (double eps : eps_list) {
    if (!(eps >= finest) || eps > d.radius) {
      throw std::invalid_argument("convex_vanishing: epsilon below quadrature resolution");
    }
    const PolarQuadrature q = make_corner_quadrature(d, eps, opt);
    const PairSamples s = sample_pair(*b.space, mode, q);
    double mv = 0, mw = 0;
    for (std::size_t ir = 0; ir < q.radial.size(); ++ir) {
      for (std::size_t it = 0; it < q.angular.size(); ++it) {
        const std::size_t k = q.index(ir, it);
        mv += q.weight(ir, it) * s.v[k];
        mw += q.weight(ir, it) * s.w[k];
      }
    }
    const double area = 0.5 * d.omega * eps * eps;
    t.rows.push_back({eps, mv / area, mw / area});
  }
  std::vector<VanishingRow> sorted = t.rows;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.epsilon > b.epsilon; });
  t.monotone_v = t.monotone_w = true;
  std::vector<double> le, lv, lw;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0) {
      t.monotone_v = t.monotone_v && std::abs(sorted[i].m_v) < std::abs(sorted[i - 1].m_v);
      t.monotone_w = t.monotone_w && std::abs(sorted[i].m_w) < std::abs(sorted[i - 1].m_w);
    }
    le.push_back(std::log(sorted[i].epsilon));
    lv.push_back(std::log(std::abs(sorted[i].m_v)));
    lw.push_back(std::log(std::abs(sorted[i].m_w)));
  }
  if (sorted.size() >= 2) {
    t.beta_v = slope(le, lv);
    t.beta_w = slope(le, lw);
  }
  return t;
}

RegularityReport weighted_regularity_check(const PolarField& u, const SectorDomain& d,
                                           const QuadratureOptions& opt) {
  if (!d.convex()) throw std::invalid_argument("weighted_regularity_check: requires omega < pi");
  RegularityReport rep;
  for (int extra : {0, 8, 16}) {
    QuadratureOptions o = opt;
    o.panels += extra;
    const PolarQuadrature q = make_quadrature(d, o);
    std::vector<double> v(q.size()), vr(q.size()), vt(q.size());
    for (std::size_t ir = 0; ir < q.radial.size(); ++ir) {
      for (std::size_t it = 0; it < q.angular.size(); ++it) {
        const FieldValue f = u(q.radial.nodes[ir], q.angular.nodes[it]);
        const std::size_t k = q.index(ir, it);
        v[k] = f.u;
        vr[k] = f.ur;
        vt[k] = f.ut;
      }
    }
    PolarSamples s;
    s.quadrature = &q;
    s.set(0, 0, std::move(v));
    s.set(1, 0, std::move(vr));
    s.set(0, 1, std::move(vt));
    const double n0 = weighted_norm(s, 0, -2.0);
    const double n1 = weighted_norm(s, 1, -1.0);
    rep.panels.push_back(o.panels);
    rep.r2_norm.push_back(n0);
    rep.grad_norm.push_back(std::sqrt(std::max(0.0, n1 * n1 - n0 * n0)));
  }
  auto close = [](double a, double b) { return std::isfinite(a) && std::abs(a - b) <= 1e-6 * std::abs(b); };
  const std::size_t n = rep.panels.size();
  rep.stable = close(rep.r2_norm[n - 2], rep.r2_norm[n - 1]) && close(rep.grad_norm[n - 2], rep.grad_norm[n - 1]);
  return rep;
}

}  // namespace itef
