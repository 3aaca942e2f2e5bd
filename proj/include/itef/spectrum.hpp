#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "itef/discretize.hpp"

namespace itef {

struct KParams {
  double kappa = -40.0;
  double lambda = 1.0;

  /// -κ/λ >= 1/λ1 (λ1 the first Dirichlet eigenvalue).
  bool positive(double lambda1) const { return -kappa / lambda >= 1.0 / lambda1; }
};

struct ItefMode {
  int index = 0;  // 1-based
  double sigma = 0.0;
  Eigen::VectorXd psi;  // A-normalized coefficient vector
  double kappa_tilde = 0.0;
  double lambda_tilde = 0.0;
  std::complex<double> k1, k2;
  bool real = false;
  bool positivity_flag = false;  // σ ≤ 0 or positivity condition violated
  double rayleigh_error = 0.0;
  // v = lap_coef Δψ + v_psi ψ, w = lap_coef Δψ + w_psi ψ
  bool synthesized = false;
  double lap_coef = 0.0;
  double v_psi = 0.0;
  double w_psi = 0.0;
  double residual_v = std::numeric_limits<double>::quiet_NaN();
  double residual_w = std::numeric_limits<double>::quiet_NaN();

  FieldValue v(const FieldValue& psi) const;  // u, lap (gradients not available)
  FieldValue w(const FieldValue& psi) const;
};

/// The largest n_modes σ of (−κS − λM) x = σ A x, in decreasing order, with xᵀAx = 1.
/// When lambda1 is finite the positivity condition is checked; a violation is reported
/// through `warning` (if given) and in every mode's positivity_flag.
std::vector<ItefMode> k_spectrum(const OperatorBundle& b, const KParams& p, int n_modes,
                                 double lambda1 = std::numeric_limits<double>::quiet_NaN(),
                                 std::string* warning = nullptr);

struct Wavenumbers {
  std::complex<double> k1, k2;
  bool real = false;
};

/// k1² = (κ̃ + √(κ̃² + 4λ̃))/2, k2² = (κ̃ − √(κ̃² + 4λ̃))/2, principal square roots.
Wavenumbers to_wavenumbers(double kt, double lt);

struct RealnessReport {
  std::vector<bool> pass;  // λ < κ²/(4σ_j)
  double fraction = 0.0;
  bool all_real = false;
};

RealnessReport realness_scan(const std::vector<ItefMode>& modes, const KParams& p);

/// Fills lap_coef, v_psi, w_psi. Throws NumericalError("near-degenerate pair") when
/// |k2² − k1²| is below 1e-12 (κ̃ + 1) and std::invalid_argument for complex wavenumbers.
ItefMode synthesize_itef(ItefMode mode);

/// Residuals of (Δ + k1²) v = 0 and (Δ + k2²) w = 0 measured on a finer reference space:
/// the functional φ ↦ ∫ (Δ + k²) v φ in the A⁻¹ dual norm, divided by the same norm of
/// φ ↦ ∫ v φ.
struct HelmholtzResiduals {
  double v = 0.0;
  double w = 0.0;
};

/// `reference` must contain the span of b's space and share its quadrature.
HelmholtzResiduals helmholtz_residuals(const OperatorBundle& b, const ItefMode& mode,
                                       const OperatorBundle& reference);

}  // namespace itef
