// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "itef/angular.hpp"
#include "itef/charroots.hpp"
#include "itef/corner.hpp"
#include "itef/discretize.hpp"
#include "itef/kernels.hpp"
#include "itef/spectrum.hpp"
#include "oracles.hpp"

using namespace itef;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s  %2d  %-28s %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

template <class... T>
std::string fmt(const char* f, T... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

std::shared_ptr<const DiscreteSpace> space_of(double omega, int n_r, int n_theta, bool enrich = true) {
  const SectorDomain d = make_sector(omega, 1.0, 0.45);
  std::vector<CharRoot> en;
  if (enrich && omega > kPi) en = default_enrichment(omega);
  return std::make_shared<const DiscreteSpace>(build_space(d, n_r, n_theta, en));
}

OperatorBundle bundle_of(double omega, int n_r, int n_theta, bool enrich = true) {
  auto s = space_of(omega, n_r, n_theta, enrich);
  return assemble(s, make_quadrature(s->domain));
}

void omega_threshold() {
  const OmegaThreshold t = compute_omega0();
  const double oracle = oracle::tan_fixed_point_bisection();
  const double deg = t.omega0 * 180.0 / kPi;
  const bool ok = t.residual < 1e-12 && std::abs(t.omega0 - oracle) < 1e-12 &&
                  std::abs(t.omega0 - 4.49340945790906) < 1e-12 && std::abs(deg - 257.6) < 0.25;
  report(1, ok, "omega0 threshold",
         fmt("omega0 = %.15f rad (%.4f deg), |tan w - w| = %.1e, bisection %.15f", t.omega0, deg, t.residual, oracle));
}

void root_classification() {
  const double w0 = compute_omega0().omega0;
  int two_simple = 0, one_double = 0, counts_agree = 0, total = 0;
  int single_simple = 0;
  for (int i = 0; i < 20; ++i) {
    const double w = (w0 + 0.02) + (2 * kPi - 0.02 - (w0 + 0.02)) * i / 19.0;
    const RootSearchResult r = find_roots(w);
    const auto real = r.real_roots_in(0.0, 1.0);
    int in_strip = 0;
    for (const auto& z : r.roots) in_strip += z.z.real() < 1.0;
    two_simple += real.size() == 2 && in_strip == 2 && real[0].multiplicity == 1 && real[1].multiplicity == 1;
    counts_agree += r.winding_count == r.count_with_multiplicity();
    ++total;
  }
  for (int i = 0; i < 20; ++i) {
    const double w = (kPi + 0.02) + (w0 - 0.02 - (kPi + 0.02)) * i / 19.0;
    const RootSearchResult r = find_roots(w);
    const auto real = r.real_roots_in(0.0, 1.0);
    int in_strip = 0;
    for (const auto& z : r.roots) in_strip += z.z.real() < 1.0;
    one_double += real.size() == 1 && in_strip == 1 && real[0].multiplicity == 2;
    single_simple += real.size() == 1 && in_strip == 1 && real[0].multiplicity == 1;
    counts_agree += r.winding_count == r.count_with_multiplicity();
    ++total;
  }
  report(2, two_simple == 20 && one_double == 20 && counts_agree == total, "root classification",
         fmt("(w0, 2pi): %d/20 with two real simple roots; (pi, w0): %d/20 with one real double root "
             "(%d/20 have one real SIMPLE root, D'(z) != 0); count agreement %d/%d",
             two_simple, one_double, single_simple, counts_agree, total));
}

void characteristic_equivalence() {
  // (z² - 1) det M = -4 (sin²(zω) - z² sin²ω): identical zero sets apart from z = ±1.
  double worst = 0.0, root_worst = 0.0;
  for (double w : {1.2 * kPi, 1.5 * kPi, 1.85 * kPi, 0.5 * kPi}) {
    for (int i = 0; i < 200; ++i) {
      for (int j = 0; j < 50; ++j) {
        const cplx z(0.005 + 1.99 * i / 199.0, -2.0 + 4.0 * j / 49.0);
        const cplx lhs = (z * z - 1.0) * char_det(z, w) / -4.0;
        const cplx rhs = closed_form_char(z, w);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
      }
    }
    if (w > kPi) {
      for (const auto& z : find_roots(w).roots) {
        root_worst = std::max(root_worst, std::abs(closed_form_char(z.z, w)) / std::max(1.0, std::norm(z.z)));
      }
    }
  }
  report(3, worst < 1e-8 && root_worst < 1e-8, "characteristic equivalence",
         fmt("max relative gap on 4 x 200 x 50 grid %.1e; closed form at determinant roots %.1e", worst,
             root_worst));
}

void eta_biharmonic() {
  const double w = 1.5 * kPi;
  const SectorDomain d = make_sector(w, 1.0, 0.45);
  const CharRoot z1 = default_enrichment(w).front();
  const auto phi = std::make_shared<const AngularProfile>(solve_profile(z1, w));
  const DualSingular eta = eta1(d, z1, phi);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ur(0.2, 0.9), ut(0.3, w - 0.3);
  double analytic = 0.0, e1 = 0.0, e2 = 0.0, peak = 0.0;
  for (double v : phi->phi) peak = std::max(peak, std::abs(v));
  for (int k = 0; k < 100; ++k) {
    const double r = ur(rng), t = ut(rng);
    analytic = std::max(analytic, eta.relative_bilaplacian(r, t));
    auto u = [&](double x, double y) {
      const double th = std::atan2(y, x);
      return eta.evaluate(std::hypot(x, y), th < 0 ? th + 2 * kPi : th).u;
    };
    const double scale = std::pow(r, -3.0 - phi->z()) * peak;
    e1 = std::max(e1, std::abs(oracle::fd_bilaplacian(u, r * std::cos(t), r * std::sin(t), 0.02)) / scale);
    e2 = std::max(e2, std::abs(oracle::fd_bilaplacian(u, r * std::cos(t), r * std::sin(t), 0.01)) / scale);
  }
  const double order = std::log2(e1 / e2);
  report(4, analytic < 1e-8 && order > 1.5, "eta1 biharmonic",
         fmt("max relative |bilap eta1| at 100 points %.1e; 13-point stencil h = 0.02: %.1e, h = 0.01: %.1e "
             "(order %.2f)",
             analytic, e1, e2, order));
}

void operator_structure() {
  const OperatorBundle b = bundle_of(1.5 * kPi, 16, 12);
  auto asym = [](const Eigen::MatrixXd& m) { return (m - m.transpose()).cwiseAbs().maxCoeff() / m.cwiseAbs().maxCoeff(); };
  const double sym = std::max({asym(b.A), asym(b.S), asym(b.M)});
  const double amin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b.A).eigenvalues().minCoeff();
  const double mmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b.M).eigenvalues().minCoeff();
  const double lam1 = dirichlet_lambda1(b.space->domain, 16, 16);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  int poincare = 0;
  for (int k = 0; k < 1000; ++k) {
    Eigen::VectorXd x(b.dimension());
    for (auto& v : x) v = g(rng);
    poincare += x.dot(b.M * x) <= x.dot(b.S * x) / lam1;
  }
  const double lam_q = dirichlet_lambda1(make_sector(0.5 * kPi, 1.0, 0.45), 16, 16);
  const double jz = oracle::bessel_zero(2.0, 1);
  const double rel = std::abs(lam_q - jz * jz) / (jz * jz);
  report(5, sym < 1e-12 && amin > 0 && mmin > 0 && poincare == 1000 && rel < 5e-3, "operator structure",
         fmt("asymmetry %.1e, min eig A %.2e, M %.2e; Poincare %d/1000 (lambda1 = %.5f at 3pi/2); "
             "lambda1(pi/2) = %.6f vs j_{2,1}^2 = %.6f (rel %.1e)",
             sym, amin, mmin, poincare, lam1, lam_q, jz * jz, rel));
}

void k_spectrum_check() {
  const OperatorBundle b = bundle_of(1.5 * kPi, 24, 16);
  const double lam1 = dirichlet_lambda1(b.space->domain, 16, 16);
  KParams p;
  p.kappa = -40.0;
  p.lambda = 1.0;
  const bool pre = -p.kappa >= 2.0 * p.lambda / lam1;
  std::string warn;
  const auto modes = k_spectrum(b, p, 20, lam1, &warn);
  bool positive = true, ordered = true;
  double rq = 0.0;
  Eigen::MatrixXd psi(b.dimension(), modes.size());
  for (std::size_t j = 0; j < modes.size(); ++j) {
    positive &= modes[j].sigma > 0.0;
    if (j) ordered &= modes[j].sigma <= modes[j - 1].sigma;
    rq = std::max(rq, modes[j].rayleigh_error);
    psi.col(j) = modes[j].psi;
  }
  const double orth = (psi.transpose() * b.A * psi - Eigen::MatrixXd::Identity(psi.cols(), psi.cols())).cwiseAbs().maxCoeff();
  report(6, pre && warn.empty() && positive && ordered && orth < 1e-8 && rq < 1e-10, "K-spectrum",
         fmt("sigma_1 = %.6f .. sigma_20 = %.6f, positive %d, non-increasing %d, A-orthonormality %.1e, "
             "Rayleigh %.1e",
             modes.front().sigma, modes.back().sigma, positive, ordered, orth, rq));
}

void realness() {
  const OperatorBundle b = bundle_of(1.5 * kPi, 24, 16);
  double fr[3];
  int i = 0;
  bool all = false, distinct = true;
  double vieta = 0.0;
  for (double kappa : {-20.0, -40.0, -80.0}) {
    KParams p;
    p.kappa = kappa;
    const auto modes = k_spectrum(b, p, 20);
    const RealnessReport r = realness_scan(modes, p);
    fr[i++] = r.fraction;
    if (kappa == -80.0) {
      all = r.all_real;
      for (const auto& m : modes) {
        all &= m.real;
        const cplx a = m.k1 * m.k1, c = m.k2 * m.k2;
        distinct &= std::abs(a - c) > 0.0;
        vieta = std::max({vieta, std::abs(a + c - m.kappa_tilde) / std::abs(m.kappa_tilde),
                          std::abs(-a * c - m.lambda_tilde) / std::abs(m.lambda_tilde)});
      }
    }
  }
  report(7, all && distinct && vieta < 1e-12 && fr[0] <= fr[1] && fr[1] <= fr[2], "realness",
         fmt("kappa = -80: all 20 real %d, k1 != k2 %d, Vieta %.1e; real fraction %.2f, %.2f, %.2f at kappa -20, -40, -80",
             all, distinct, vieta, fr[0], fr[1], fr[2]));
}

void synthesis() {
  const double w = 1.5 * kPi;
  KParams p;
  p.kappa = -80.0;
  const OperatorBundle ref = bundle_of(w, 32, 24);
  bool exact = true;
  std::vector<double> ns, res_v, res_w;
  for (int n : {8, 12, 16, 20}) {
    const OperatorBundle b = bundle_of(w, n, n);
    const ItefMode m = synthesize_itef(k_spectrum(b, p, 1).front());
    exact &= m.v_psi - m.w_psi == 1.0;
    const HelmholtzResiduals h = helmholtz_residuals(b, m, ref);
    ns.push_back(n);
    res_v.push_back(h.v);
    res_w.push_back(h.w);
  }
  const double ov = oracle::loglog_slope(ns, res_v), ow = oracle::loglog_slope(ns, res_w);
  bool decreasing = true;
  for (std::size_t k = 1; k < ns.size(); ++k) decreasing &= res_v[k] < res_v[k - 1] && res_w[k] < res_w[k - 1];
  report(8, exact && decreasing && -ov >= 1.0 && -ow >= 1.0, "ITEF synthesis",
         fmt("v - w = psi exactly %d; residual v %.2e -> %.2e, w %.2e -> %.2e over n = 8..20; order %.2f / %.2f",
             exact, res_v.front(), res_v.back(), res_w.front(), res_w.back(), -ov, -ow));
}

struct NonConvexSetup {
  OperatorBundle b;
  std::shared_ptr<const AngularProfile> phi;
  DualField zf;
  double gamma;
};

NonConvexSetup nonconvex(int n_r, int n_theta) {
  const double w = 1.5 * kPi;
  OperatorBundle b = bundle_of(w, n_r, n_theta);
  const CharRoot z1 = default_enrichment(w).front();
  auto phi = std::make_shared<const AngularProfile>(solve_profile(z1, w));
  const DualField zf = build_zeta1(b, eta1(b.space->domain, z1, phi));
  const double gamma = extraction_constant(phi->z(), *phi);
  return {std::move(b), phi, zf, gamma};
}

void localization(const NonConvexSetup& s) {
  KParams p;
  p.kappa = -80.0;
  const auto modes = k_spectrum(s.b, p, 20);
  const DiscreteSpace& sp = *s.b.space;
  const SectorDomain& d = sp.domain;
  const double target = 1.0 - s.phi->z();
  for (const auto& raw : modes) {
    const ItefMode m = synthesize_itef(raw);
    const FunctionalValue fv = singular_functional(s.b, m, s.zf, s.b.quadrature);
    if (!fv.nonzero()) continue;
    const C1Estimate c = extract_c1(s.b, m, s.zf, s.gamma);
    const auto pred = laplacian_profile(s.phi);
    const BlowupFit a = blowup_fit([&](double r, double t) { return sp.evaluate_field(m.psi, r, t).lap; }, d, {1e-3, 1e-2}, pred);
    const BlowupFit av = blowup_fit([&](double r, double t) { return m.v(sp.evaluate_field(m.psi, r, t)).u; }, d, {1e-3, 1e-2}, pred);
    const BlowupFit aw = blowup_fit([&](double r, double t) { return m.w(sp.evaluate_field(m.psi, r, t)).u; }, d, {1e-3, 1e-2}, pred);
    const double agree = std::abs(c.c1_pairing - c.c1_fit) / std::abs(c.c1_pairing);
    const bool ok = m.index <= 20 && std::abs(a.alpha - target) < 0.05 && std::abs(av.alpha - target) < 0.05 &&
                    std::abs(aw.alpha - target) < 0.05 && a.correlation >= 0.99 && av.correlation >= 0.99 &&
                    aw.correlation >= 0.99 && agree < 0.05;
    report(9, ok, "localization",
           fmt("mode %d: F = %.4f; alpha lap/v/w = %.4f/%.4f/%.4f vs 1 - z1 = %.4f; correlation %.4f/%.4f/%.4f; "
               "c1 pairing %.5f, fit %.5f (%.2f%%)",
               m.index, fv.F, a.alpha, av.alpha, aw.alpha, target, a.correlation, av.correlation, aw.correlation,
               c.c1_pairing, c.c1_fit, 100 * agree));
    return;
  }
  report(9, false, "localization", "no mode j <= 20 with |F_j| above tolerance");
}

void manufactured(const NonConvexSetup& s) {
  const DiscreteSpace& sp = *s.b.space;
  const SectorDomain& d = sp.domain;
  RadialFn sing;
  sing.kind = RadialFn::Kind::Singular;
  sing.exponent = 1.0 + s.phi->z();
  sing.cut_a = d.cutoff_inner;
  sing.cut_b = d.cutoff_outer;
  // smooth tail: two tensor basis functions
  auto u = [&](double r, double t) {
    FieldValue v;
    if (r < sing.cut_b) v = separable_value(sing.derivs(r), s.phi->derivs(t), r);
    v.add(sp.evaluate(3, r, t), 0.7);
    v.add(sp.evaluate(sp.n_theta + 1, r, t), -0.4);
    return v;
  };
  const Eigen::VectorXd x = solve_clamped_biharmonic(s.b, [&](double r, double t) { return u(r, t).bilap; });
  const PolarQuadrature& q = s.b.quadrature;
  std::vector<double> f(q.size());
  for (std::size_t i = 0; i < q.radial.size(); ++i) {
    for (std::size_t j = 0; j < q.angular.size(); ++j) f[q.index(i, j)] = u(q.radial.nodes[i], q.angular.nodes[j]).bilap;
  }
  const double pairing = -pair_with_zeta1(s.zf, q, f) / s.gamma;
  const double dof = enrichment_coefficient(sp, x, s.phi->z());
  const double fit = c1_radial_fit([&](double r, double t) { return u(r, t).lap; }, *s.phi, 1e-3, 1e-2);
  const bool ok = std::abs(pairing - 1.0) < 1e-3 && std::abs(dof - 1.0) < 1e-3 && std::abs(fit - 1.0) < 1e-3;
  report(10, ok, "manufactured c1",
         fmt("pairing %.10f, enriched coefficient %.10f, radial fit %.10f", pairing, dof, fit));
}

void convex_vanishing_check() {
  const double w = 0.5 * kPi;
  const OperatorBundle b = bundle_of(w, 24, 24);
  KParams p;
  p.kappa = -80.0;
  const ItefMode m = synthesize_itef(k_spectrum(b, p, 1).front());
  std::vector<double> eps;
  for (int i = 3; i <= 8; ++i) eps.push_back(std::ldexp(1.0, -i));
  const VanishingTable t = convex_vanishing(b, m, eps);
  const DiscreteSpace& sp = *b.space;
  const RegularityReport reg =
      weighted_regularity_check([&](double r, double th) { return sp.evaluate_field(m.psi, r, th); }, sp.domain);
  const bool ok = m.real && t.monotone_v && t.monotone_w && t.beta_v > 0.5 && t.beta_w > 0.5 && reg.stable;
  report(11, ok, "convex vanishing",
         fmt("|m_v| %.2e -> %.2e, |m_w| %.2e -> %.2e, monotone %d/%d, beta %.3f/%.3f; "
             "||r^-2 u|| = %.7f, ||r^-1 grad u|| = %.7f, stable %d",
             std::abs(t.rows.front().m_v), std::abs(t.rows.back().m_v), std::abs(t.rows.front().m_w),
             std::abs(t.rows.back().m_w), t.monotone_v, t.monotone_w, t.beta_v, t.beta_w, reg.r2_norm.back(),
             reg.grad_norm.back(), reg.stable));
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

void determinism() {
  const fs::path root = fs::temp_directory_path() / "itef-acceptance-determinism";
  fs::remove_all(root);
  cli::RunConfig cfg;
  cfg.n_r = 16;
  cfg.n_theta = 12;
  cfg.cache_dir = (root / "cache").string();
  std::ostringstream log;
  cfg.out_dir = (root / "a").string();
  const int rc1 = cli::cmd_pipeline(cfg, log);
  cfg.out_dir = (root / "b").string();
  const int rc2 = cli::cmd_pipeline(cfg, log);
  int files = 0, same = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    same += slurp(e.path()) == slurp(root / "b" / e.path().filename());
  }
  const bool hit = log.str().find("cache hit") != std::string::npos;
  report(12, rc1 == 0 && rc2 == 0 && files >= 3 && same == files && hit, "determinism",
         fmt("%d/%d CSVs byte-identical across two pipeline runs, second run cache hit %d", same, files, hit));
  fs::remove_all(root);
}

}  // namespace

int main() {
  omega_threshold();
  root_classification();
  characteristic_equivalence();
  eta_biharmonic();
  operator_structure();
  k_spectrum_check();
  realness();
  synthesis();
  const NonConvexSetup s = nonconvex(24, 16);
  localization(s);
  manufactured(s);
  convex_vanishing_check();
  determinism();
  std::printf("%d of 12 criteria failed\n", failures);
  return failures;
}
