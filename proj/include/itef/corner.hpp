#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "itef/angular.hpp"
#include "itef/discretize.hpp"
#include "itef/spectrum.hpp"

namespace itef {

/// |F| below tolerance: c1 may still be nonzero, the criterion only gives a sufficient condition.
class CriterionInconclusive : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ζ1 = χ η1 + h with Δ²h = -Δ²(χ η1) (clamped), h in the bundle's space.
struct DualField {
  std::shared_ptr<const DiscreteSpace> space;
  std::shared_ptr<const AngularProfile> profile;
  RadialFn chi_radial;  // χ(r) r^{1 - z1}
  Eigen::VectorXd h;
  double residual = 0.0;  // relative residual of the discrete solve for h

  double z1() const { return profile->z(); }
  FieldValue chi_eta(double r, double theta) const;
  FieldValue evaluate(double r, double theta) const;
  /// -Δ²(χ η1); identically zero off the blend band.
  double source(double r, double theta) const;
};

DualField build_zeta1(const OperatorBundle& b, const DualSingular& eta);

/// Residual of Δ²ζ1 = 0 tested against a finer nested space: the dual norm of
/// φ ↦ ∫ Δh Δφ - ∫ source φ divided by the dual norm of the source.
double zeta1_residual(const DualField& zf, const OperatorBundle& reference);

/// ∫ ζ1 f over q (f given at the nodes of q, PolarQuadrature::index order).
double pair_with_zeta1(const DualField& zf, const PolarQuadrature& q, const std::vector<double>& f);

struct FunctionalValue {
  double F = 0.0;
  double scale = 0.0;  // ||ζ1|| ||λ̃ψ - κ̃Δψ||, the Cauchy-Schwarz bound on |F|
  bool nonzero(double rel_tol = 1e-8) const { return std::abs(F) > rel_tol * scale; }
};

/// F = ∫ ζ1 (λ̃ψ - κ̃Δψ) dx. ψ lives in b's space; q may differ from b.quadrature.
FunctionalValue singular_functional(const OperatorBundle& b, const ItefMode& mode,
                                    const DualField& zf, const PolarQuadrature& q);

/// Coefficient of the χ r^{1+z} φ member in x, or NaN when the space has no such member.
double enrichment_coefficient(const DiscreteSpace& space, const Eigen::VectorXd& x, double z);

using PointField = std::function<double(double r, double theta)>;

/// Weighted least squares of lap ≈ c r^{z-1}((1+z)²φ + φ'') on r in [lo, hi].
double c1_radial_fit(const PointField& lap, const AngularProfile& phi, double lo, double hi);

struct C1Estimate {
  FunctionalValue functional;
  double gamma = 0.0;
  double c1_pairing = std::numeric_limits<double>::quiet_NaN();  // -F / γ
  double c1_fit = std::numeric_limits<double>::quiet_NaN();
};

/// Throws CriterionInconclusive when |F| <= rel_tol · scale.
/// c1_fit uses the enriched coefficient, or the radial fit on `window` · R without enrichment.
C1Estimate extract_c1(const OperatorBundle& b, const ItefMode& mode, const DualField& zf,
                      double gamma, std::pair<double, double> window = {1e-3, 1e-2},
                      double rel_tol = 1e-8);

struct BlowupFit {
  double alpha = 0.0;        // |field| averaged over θ ≈ C r^{-alpha}
  double correlation = 0.0;  // |cos| between fitted C(θ) and the predicted factor (NaN if none)
  double prefactor = 0.0;
};

/// Samples `radial_points` log-spaced radii in window · R and Gauss nodes in θ.
/// Throws NumericalError when the field vanishes on the window.
BlowupFit blowup_fit(const PointField& field, const SectorDomain& d,
                     std::pair<double, double> window = {1e-3, 1e-2},
                     const std::function<double(double)>& predicted = {},
                     int radial_points = 24, int angular_points = 64);

/// (1+z)²φ + φ'': the angular factor of Δ(r^{1+z} φ).
std::function<double(double)> laplacian_profile(std::shared_ptr<const AngularProfile> phi);

struct VanishingRow {
  double epsilon = 0.0;
  double m_v = 0.0;
  double m_w = 0.0;
};

struct VanishingTable {
  std::vector<VanishingRow> rows;
  double beta_v = 0.0;  // |m(ε)| ≈ C ε^β, least squares in log-log
  double beta_w = 0.0;
  bool monotone_v = false;
  bool monotone_w = false;
};

/// m(ε) = |C_ε|⁻¹ ∫_{C_ε} v dx (and w) on the graded corner rule.
/// Throws std::invalid_argument for ω >= π, unsynthesized modes, or ε below the
/// finest radial panels of the rule.
VanishingTable convex_vanishing(const OperatorBundle& b, const ItefMode& mode,
                                const std::vector<double>& eps_list,
                                const QuadratureOptions& opt = {});

struct RegularityReport {
  std::vector<int> panels;
  std::vector<double> r2_norm;    // ||r^{-2} u||
  std::vector<double> grad_norm;  // ||r^{-1} ∇u||
  bool stable = false;            // last two refinements agree to 1e-6 relative
};

using PolarField = std::function<FieldValue(double r, double theta)>;

/// Refines the corner grading (panels, panels + 8, panels + 16) and reports both norms.
RegularityReport weighted_regularity_check(const PolarField& u, const SectorDomain& d,
                                           const QuadratureOptions& opt = {});

/// Fields of the synthesized pair at the nodes of q; u = v - w = ψ.
struct PairSamples {
  std::vector<double> v, w, psi_lap, psi;
};
PairSamples sample_pair(const DiscreteSpace& space, const ItefMode& mode, const PolarQuadrature& q);

}  // namespace itef
