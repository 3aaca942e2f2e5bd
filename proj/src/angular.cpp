#include "itef/angular.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/SVD>

namespace itef {

namespace {

// θ-derivatives 0..4 of the four basis functions at real z.
std::array<Derivs, 4> basis_derivs(double z, double t) {
  std::array<Derivs, 4> out{};
  const double as[2] = {1.0 + z, 1.0 - z};
  for (int p = 0; p < 2; ++p) {
    const double a = as[p];
    const double c = std::cos(a * t), s = std::sin(a * t);
    Derivs& dc = out[2 * p];
    dc = {c, -a * s, -a * a * c, a * a * a * s, a * a * a * a * c};
    Derivs& ds = out[2 * p + 1];
    const double u = a * t;
    double sval;
    if (std::abs(u) < 1e-4) {
      sval = t * (1.0 - u * u / 6.0 + u * u * u * u / 120.0);
    } else {
      sval = s / a;
    }
    ds = {sval, c, -a * s, -a * a * c, a * a * a * s};
  }
  return out;
}

Derivs combine(const std::array<double, 4>& coef, double z, double t) {
  const auto b = basis_derivs(z, t);
  Derivs d{};
  for (int k = 0; k < 4; ++k) {
    for (int m = 0; m <= kJetOrder; ++m) d[m] += coef[k] * b[k][m];
  }
  return d;
}

double ode_lhs(const Derivs& d, double z) {
  const double z2 = z * z;
  return d[4] + 2.0 * (1.0 + z2) * d[2] + (z2 - 1.0) * (z2 - 1.0) * d[0];
}

void sample(const std::function<Derivs(double)>& f, double omega, int n, std::vector<double>& theta,
            std::vector<double>& phi, std::vector<double>& dphi, std::vector<double>& d2phi) {
  theta.resize(n);
  phi.resize(n);
  dphi.resize(n);
  d2phi.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = (n == 1) ? 0.0 : omega * i / (n - 1);
    const Derivs d = f(t);
    theta[i] = t;
    phi[i] = d[0];
    dphi[i] = d[1];
    d2phi[i] = d[2];
  }
}

}  // namespace

Derivs AngularProfile::derivs(double t) const { return combine(coefficients, z(), t); }

AngularProfile solve_profile(const CharRoot& root, double omega, int n_theta, double tol) {
  if (!root.is_real) throw std::invalid_argument("solve_profile: profiles need a real root");
  if (n_theta < 2) throw std::invalid_argument("solve_profile: n_theta must be >= 2");
  const double z = root.z.real();
  const double res = std::abs(char_det(z, omega));
  if (!(res < std::max(tol, 1e-8))) {
    throw std::invalid_argument("solve_profile: |char_det| = " + std::to_string(res) +
                                " is not below the root tolerance");
  }
  const Eigen::Matrix4d M = char_matrix(z, omega).real();
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(2) < 1e-8 * s(0)) throw NumericalError("nullspace dimension != 1");
  const Eigen::Vector4d v = svd.matrixV().col(3);

  AngularProfile p;
  p.root = root;
  p.omega = omega;
  for (int k = 0; k < 4; ++k) p.coefficients[k] = v(k);

  const Rule1D g = gauss_legendre(160, 0.0, omega);
  auto norms = [&](double& n0, double& n1) {
    n0 = n1 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Derivs d = p.derivs(g.nodes[i]);
      n0 += g.weights[i] * d[0] * d[0];
      n1 += g.weights[i] * d[1] * d[1];
    }
    n0 = std::sqrt(n0);
    n1 = std::sqrt(n1);
  };
  double n0, n1;
  norms(n0, n1);
  double scale = 1.0 / n0;
  const Derivs d0 = p.derivs(0.0);
  const double lead = std::abs(d0[2]) > 1e-10 * std::abs(d0[3]) ? d0[2] : d0[3];
  if (lead < 0) scale = -scale;
  for (auto& c : p.coefficients) c *= scale;
  norms(p.norm_l2, p.dnorm_l2);
  sample([&](double t) { return p.derivs(t); }, omega, n_theta, p.theta, p.phi, p.dphi, p.d2phi);
  return p;
}

double profile_ode_residual(const AngularProfile& p, int n) {
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    const Derivs d = p.derivs(p.omega * i / (n - 1));
    worst = std::max(worst, std::abs(ode_lhs(d, p.z())));
    scale = std::max(scale, std::abs(d[4]));
  }
  return worst / scale;
}

namespace {

// Chebyshev points θ_j = ω(1 - cos(πj/N))/2 and the θ-differentiation matrix.
void chebyshev(int N, double omega, Eigen::VectorXd& th, Eigen::MatrixXd& D) {
  Eigen::VectorXd x(N + 1);
  for (int j = 0; j <= N; ++j) x(j) = std::cos(kPi * j / N);
  D.resize(N + 1, N + 1);
  auto c = [&](int j) { return ((j == 0 || j == N) ? 2.0 : 1.0) * ((j % 2 == 0) ? 1.0 : -1.0); };
  for (int i = 0; i <= N; ++i) {
    double diag = 0.0;
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      D(i, j) = c(i) / c(j) / (x(i) - x(j));
      diag -= D(i, j);
    }
    D(i, i) = diag;
  }
  D *= -2.0 / omega;
  th = omega * 0.5 * (Eigen::VectorXd::Ones(N + 1) - x);
}

Eigen::VectorXd clenshaw_curtis(int N, double omega) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(N + 1);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(N - 1);
  auto ang = [&](int i) { return kPi * i / N; };
  if (N % 2 == 0) {
    w(0) = w(N) = 1.0 / (N * N - 1.0);
    for (int k = 1; k < N / 2; ++k) {
      for (int i = 1; i < N; ++i) v(i - 1) -= 2.0 * std::cos(2.0 * k * ang(i)) / (4.0 * k * k - 1.0);
    }
    for (int i = 1; i < N; ++i) v(i - 1) -= std::cos(N * ang(i)) / (N * N - 1.0);
  } else {
    w(0) = w(N) = 1.0 / (N * N);
    for (int k = 1; k <= (N - 1) / 2; ++k) {
      for (int i = 1; i < N; ++i) v(i - 1) -= 2.0 * std::cos(2.0 * k * ang(i)) / (4.0 * k * k - 1.0);
    }
  }
  for (int i = 1; i < N; ++i) w(i) = 2.0 * v(i - 1) / N;
  return w * (omega / 2.0);
}

}  // namespace

Derivs AssociatedProfile::derivs(double t) const {
  const std::size_t n = nodes.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(t - nodes[j]) < 1e-15 * (1.0 + omega)) return nodal[j];
  }
  Derivs num{};
  double den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double c = bary[j] / (t - nodes[j]);
    den += c;
    for (int m = 0; m <= kJetOrder; ++m) num[m] += c * nodal[j][m];
  }
  for (auto& v : num) v /= den;
  return num;
}

AssociatedProfile solve_associated(const CharRoot& root, std::shared_ptr<const AngularProfile> phi,
                                   double omega, int n_colloc, int n_theta) {
  if (root.multiplicity != 2 || !root.is_real) {
    throw std::invalid_argument("solve_associated: needs a real double root");
  }
  if (!phi) throw std::invalid_argument("solve_associated: missing partner profile");
  const int N = n_colloc;
  const double z = root.z.real(), z2 = z * z;
  Eigen::VectorXd th;
  Eigen::MatrixXd D;
  chebyshev(N, omega, th, D);
  const Eigen::MatrixXd D2 = D * D;
  const Eigen::MatrixXd D4 = D2 * D2;
  Eigen::MatrixXd K = D4 + 2.0 * (1.0 + z2) * D2 +
                      (z2 - 1.0) * (z2 - 1.0) * Eigen::MatrixXd::Identity(N + 1, N + 1);
  Eigen::VectorXd rhs(N + 1), phin(N + 1);
  for (int j = 0; j <= N; ++j) {
    const Derivs d = phi->derivs(th(j));
    phin(j) = d[0];
    rhs(j) = -4.0 * z * d[2] - 4.0 * (z2 * z - z) * d[0];
  }
  K.row(0).setZero();
  K(0, 0) = 1.0;
  K.row(1) = D.row(0);
  K.row(N - 1) = D.row(N);
  K.row(N).setZero();
  K(N, N) = 1.0;
  rhs(0) = rhs(1) = rhs(N - 1) = rhs(N) = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double s = K.row(i).cwiseAbs().maxCoeff();
    K.row(i) /= s;
    rhs(i) /= s;
  }

  AssociatedProfile p;
  p.root = root;
  p.omega = omega;
  p.partner = phi;
  Eigen::JacobiSVD<Eigen::MatrixXd> sq(K);
  const auto& sv = sq.singularValues();
  p.smallest_singular = sv(N) / sv(0);
  p.second_singular = sv(N - 1) / sv(0);
  if (p.second_singular < 1e-3 * std::sqrt(p.smallest_singular) ||
      p.second_singular < 1e-12) {
    throw NumericalError("inconsistent forcing: collocation system has more than one null direction");
  }

  const Eigen::VectorXd cc = clenshaw_curtis(N, omega);
  Eigen::MatrixXd B(N + 2, N + 1);
  B.topRows(N + 1) = K;
  B.row(N + 1) = (cc.array() * phin.array()).matrix().transpose();
  Eigen::VectorXd rb(N + 2);
  rb.head(N + 1) = rhs;
  rb(N + 1) = 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> ls(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd u = ls.solve(rb);
  const double rel = (B * u - rb).norm() / rb.norm();
  if (!(rel < 1e-6)) {
    throw NumericalError("inconsistent forcing: forcing is not in the range (relative residual " +
                         std::to_string(rel) + "); z is not a double root");
  }
  const double nrm = std::sqrt((cc.array() * u.array() * u.array()).sum());
  p.forcing_scale = 1.0 / nrm;
  u /= nrm;

  p.nodes.assign(th.data(), th.data() + N + 1);
  p.nodal.resize(N + 1);
  Eigen::VectorXd dm = u;
  for (int m = 0; m <= kJetOrder; ++m) {
    for (int j = 0; j <= N; ++j) p.nodal[j][m] = dm(j);
    dm = D * dm;
  }
  // Boundary conditions hold identically; remove collocation round-off there.
  p.nodal[0][0] = p.nodal[N][0] = 0.0;
  p.bary.resize(N + 1);
  for (int j = 0; j <= N; ++j) {
    p.bary[j] = ((j % 2 == 0) ? 1.0 : -1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);
  }
  p.norm_l2 = 1.0;
  sample([&](double t) { return p.derivs(t); }, omega, n_theta, p.theta, p.phi, p.dphi, p.d2phi);
  return p;
}

double associated_ode_residual(const AssociatedProfile& p, int n) {
  const double z = p.z(), z2 = z * z;
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = p.omega * (i + 0.5) / n;
    const Derivs d = p.derivs(t);
    const Derivs f = p.partner->derivs(t);
    const double forcing = p.forcing_scale * (-4.0 * z * f[2] - 4.0 * (z2 * z - z) * f[0]);
    worst = std::max(worst, std::abs(ode_lhs(d, z) - forcing));
    scale = std::max({scale, std::abs(d[4]), std::abs(forcing)});
  }
  return worst / scale;
}

DualSingular::DualSingular(std::shared_ptr<const AngularProfile> phi, double radius)
    : phi_(std::move(phi)), radius_(radius) {
  if (!phi_) throw std::invalid_argument("DualSingular: missing profile");
}

FieldValue DualSingular::evaluate(double r, double theta) const {
  const Derivs R = Jet::power(r, exponent()).derivs();
  return separable_value(R, phi_->derivs(theta), r);
}

double DualSingular::relative_bilaplacian(double r, double theta) const {
  const Derivs T = phi_->derivs(theta);
  const double z = z1(), z2 = z * z;
  const double scale = std::pow(r, exponent() - 4.0) *
                       (std::abs(T[4]) + 2.0 * (1.0 + z2) * std::abs(T[2]) +
                        (z2 - 1.0) * (z2 - 1.0) * std::abs(T[0]));
  return std::abs(evaluate(r, theta).bilap) / scale;
}

DualSingular eta1(const SectorDomain& d, const CharRoot& z1,
                  std::shared_ptr<const AngularProfile> phi1) {
  if (!z1.is_real || z1.multiplicity != 1 || !(z1.z.real() > 0.0 && z1.z.real() < 1.0)) {
    throw std::invalid_argument("eta1: z1 must be a real simple root in (0,1)");
  }
  if (!(d.omega > compute_omega0().omega0)) {
    throw std::invalid_argument("eta1: requires omega in (omega0, 2*pi)");
  }
  const auto real = find_roots(d.omega).real_roots_in(0.0, 1.0);
  if (real.empty() || std::abs(real.front().z.real() - z1.z.real()) > 1e-8) {
    throw std::invalid_argument("eta1: z1 is not the smallest root in (0,1)");
  }
  if (!phi1 || std::abs(phi1->z() - z1.z.real()) > 1e-12) {
    throw std::invalid_argument("eta1: profile does not belong to z1");
  }
  return DualSingular(std::move(phi1), d.radius);
}

double extraction_constant(double z1, const AngularProfile& phi1) {
  const double n0 = phi1.norm_l2 * phi1.norm_l2;
  const double n1 = phi1.dnorm_l2 * phi1.dnorm_l2;
  return 4.0 * z1 * (z1 * z1 - 1.0) * n0 - 4.0 * z1 * n1;
}

}  // namespace itef
