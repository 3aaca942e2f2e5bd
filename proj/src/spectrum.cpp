#include "itef/spectrum.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "itef/kernels.hpp"

namespace itef {

FieldValue ItefMode::v(const FieldValue& psi) const {
  FieldValue f;
  f.u = lap_coef * psi.lap + v_psi * psi.u;
  f.lap = lap_coef * psi.bilap + v_psi * psi.lap;
  return f;
}

FieldValue ItefMode::w(const FieldValue& psi) const {
  FieldValue f;
  f.u = lap_coef * psi.lap + w_psi * psi.u;
  f.lap = lap_coef * psi.bilap + w_psi * psi.lap;
  return f;
}

std::vector<ItefMode> k_spectrum(const OperatorBundle& b, const KParams& p, int n_modes,
                                 double lambda1, std::string* warning) {
  const int n = static_cast<int>(b.dimension());
  if (n_modes < 1 || n_modes > n) throw std::invalid_argument("k_spectrum: n_modes out of range");
  if (!(p.lambda > 0.0) || !(p.kappa < 0.0)) {
    throw std::invalid_argument("k_spectrum: requires kappa < 0 < lambda");
  }
  bool violated = false;
  if (std::isfinite(lambda1) && !p.positive(lambda1)) {
    violated = true;
    if (warning) {
      *warning = "positivity condition -kappa/lambda >= 1/lambda1 violated (lambda1 = " +
                 std::to_string(lambda1) + "); negative sigma may occur";
    }
  }
  const Eigen::MatrixXd B = -p.kappa * b.S - p.lambda * b.M;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, b.A);
  if (es.info() != Eigen::Success) throw NumericalError("k_spectrum: eigensolver breakdown");
  std::vector<ItefMode> modes;
  for (int j = 0; j < n_modes; ++j) {
    const int col = n - 1 - j;
    ItefMode m;
    m.index = j + 1;
    m.sigma = es.eigenvalues()(col);
    m.psi = es.eigenvectors().col(col);
    // Fix the sign so the largest-magnitude coefficient is positive.
    Eigen::Index imax;
    m.psi.cwiseAbs().maxCoeff(&imax);
    if (m.psi(imax) < 0) m.psi = -m.psi;
    const double xa = m.psi.dot(b.A * m.psi);
    m.rayleigh_error = std::abs(m.psi.dot(B * m.psi) / xa - m.sigma) / std::abs(m.sigma);
    m.kappa_tilde = -p.kappa / m.sigma;
    m.lambda_tilde = -p.lambda / m.sigma;
    const Wavenumbers k = to_wavenumbers(m.kappa_tilde, m.lambda_tilde);
    m.k1 = k.k1;
    m.k2 = k.k2;
    m.real = k.real;
    m.positivity_flag = violated || !(m.sigma > 0.0);
    modes.push_back(std::move(m));
  }
  return modes;
}

Wavenumbers to_wavenumbers(double kt, double lt) {
  const std::complex<double> root = std::sqrt(std::complex<double>(kt * kt + 4.0 * lt, 0.0));
  const std::complex<double> a = 0.5 * (kt + root), b = 0.5 * (kt - root);
  Wavenumbers w;
  w.k1 = std::sqrt(a);
  w.k2 = std::sqrt(b);
  w.real = kt * kt + 4.0 * lt > 0.0 && a.real() > 0.0 && b.real() > 0.0;
  if (w.real) {
    w.k1 = std::sqrt(a.real());
    w.k2 = std::sqrt(b.real());
  }
  return w;
}

RealnessReport realness_scan(const std::vector<ItefMode>& modes, const KParams& p) {
  RealnessReport r;
  int n = 0;
  for (const auto& m : modes) {
    const bool ok = m.sigma > 0.0 && p.lambda < p.kappa * p.kappa / (4.0 * m.sigma);
    r.pass.push_back(ok);
    n += ok;
  }
  r.fraction = modes.empty() ? 0.0 : static_cast<double>(n) / modes.size();
  r.all_real = !modes.empty() && n == static_cast<int>(modes.size());
  return r;
}

ItefMode synthesize_itef(ItefMode mode) {
  if (!mode.real) throw std::invalid_argument("synthesize_itef: wavenumbers are not real");
  const double a1 = mode.k1.real() * mode.k1.real();
  const double a2 = mode.k2.real() * mode.k2.real();
  const double gap = a2 - a1;
  if (!(std::abs(gap) > 1e-12 * (mode.kappa_tilde + 1.0))) {
    throw NumericalError("near-degenerate pair: |k2^2 - k1^2| = " + std::to_string(std::abs(gap)));
  }
  mode.lap_coef = 1.0 / gap;
  mode.w_psi = mode.lap_coef * a1;
  mode.v_psi = mode.w_psi + 1.0;
  mode.synthesized = true;
  return mode;
}

HelmholtzResiduals helmholtz_residuals(const OperatorBundle& b, const ItefMode& mode,
                                       const OperatorBundle& reference) {
  if (!mode.synthesized) throw std::invalid_argument("helmholtz_residuals: mode not synthesized");
  if (b.quadrature.signature != reference.quadrature.signature ||
      b.space->domain.omega != reference.space->domain.omega) {
    throw std::invalid_argument("helmholtz_residuals: reference must share domain and quadrature");
  }
  const DiscreteSpace& fs = *reference.space;
  const PolarQuadrature& q = reference.quadrature;
  const auto psi = sample_field(*b.space, tabulate(*b.space, q), mode.psi);
  std::vector<double> u(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) u[k] = psi[k].u;
  const Eigen::LLT<Eigen::MatrixXd> mass(reference.M);
  const Eigen::VectorXd x = mass.solve(project(fs, tabulate(fs, q), u));
  const Eigen::VectorXd r =
      mode.lap_coef * (reference.A * x - mode.kappa_tilde * (reference.S * x) -
                       mode.lambda_tilde * (reference.M * x));
  const Eigen::VectorXd mx = reference.M * x, sx = reference.S * x;
  const Eigen::VectorXd mv = -mode.lap_coef * sx + mode.v_psi * mx;
  const Eigen::VectorXd mw = -mode.lap_coef * sx + mode.w_psi * mx;
  const Eigen::LLT<Eigen::MatrixXd> energy(reference.A);
  auto dual = [&](const Eigen::VectorXd& f) { return std::sqrt(f.dot(energy.solve(f))); };
  const double rn = dual(r);
  return {rn / dual(mv), rn / dual(mw)};
}

}  // namespace itef
