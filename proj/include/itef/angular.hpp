#pragma once

#include <array>
#include <memory>
#include <vector>

#include "itef/charroots.hpp"
#include "itef/field.hpp"
#include "itef/geometry.hpp"

namespace itef {

/// Clamped solution φ of φ'''' + 2(1+z²)φ'' + (z²-1)²φ = 0 on (0, ω) for a real
/// root z, normalized in L²(0, ω) with φ''(0) > 0.
struct AngularProfile {
  CharRoot root;
  double omega = 0.0;
  /// coefficients on {cos((1+z)θ), sin((1+z)θ)/(1+z), cos((1-z)θ), sin((1-z)θ)/(1-z)}
  std::array<double, 4> coefficients{};
  std::vector<double> theta, phi, dphi, d2phi;
  double norm_l2 = 0.0;
  double dnorm_l2 = 0.0;

  double z() const { return root.z.real(); }
  /// φ and its first four derivatives (analytic).
  Derivs derivs(double t) const;
};

/// Builds the profile from the null vector of the 4×4 clamped system.
/// Throws NumericalError("nullspace dimension != 1") when two singular values are small.
AngularProfile solve_profile(const CharRoot& root, double omega, int n_theta = 2001,
                             double tol = 1e-10);

/// max |φ'''' + 2(1+z²)φ'' + (z²-1)²φ| / max |φ''''| on an n-point uniform grid.
double profile_ode_residual(const AngularProfile& p, int n = 2001);

/// Associated profile for a double root z: clamped solution of
/// L_z ψ = -4z φ'' - 4(z³ - z) φ  (the z-derivative of L_z applied to φ, negated),
/// L²-orthogonal to φ, computed by Chebyshev collocation and normalized to unit norm.
/// The unnormalized solution is (1 / forcing_scale) times the stored one.
struct AssociatedProfile {
  CharRoot root;
  double omega = 0.0;
  double forcing_scale = 1.0;  // L_z φ̂ = forcing_scale · forcing
  std::shared_ptr<const AngularProfile> partner;
  std::vector<double> nodes;                // collocation nodes in θ
  std::vector<Derivs> nodal;                // derivatives 0..4 at the nodes
  std::vector<double> bary;                 // barycentric weights
  std::vector<double> theta, phi, dphi, d2phi;
  double norm_l2 = 0.0;
  double smallest_singular = 0.0;            // of the bordered-free square system (row-scaled)
  double second_singular = 0.0;

  double z() const { return root.z.real(); }
  Derivs derivs(double t) const;
};

/// Throws NumericalError("inconsistent forcing") when the collocation system has more
/// than one near-null direction or the forcing is not in its range.
AssociatedProfile solve_associated(const CharRoot& root, std::shared_ptr<const AngularProfile> phi,
                                   double omega, int n_colloc = 32, int n_theta = 2001);

/// max relative residual of the inhomogeneous ODE on an n-point grid.
double associated_ode_residual(const AssociatedProfile& p, int n = 1001);

/// η1 = r^{1 - z1} φ1(θ): biharmonic in the open cone, clamped on both edges.
class DualSingular {
 public:
  DualSingular(std::shared_ptr<const AngularProfile> phi, double radius);

  double z1() const { return phi_->z(); }
  double exponent() const { return 1.0 - phi_->z(); }
  const AngularProfile& profile() const { return *phi_; }
  std::shared_ptr<const AngularProfile> profile_ptr() const { return phi_; }

  FieldValue evaluate(double r, double theta) const;
  /// |Δ²η1| relative to the size of its individual terms at the point.
  double relative_bilaplacian(double r, double theta) const;

 private:
  std::shared_ptr<const AngularProfile> phi_;
  double radius_;
};

/// Requires z1 to be the smallest real simple root in (0,1) and ω in (ω0, 2π).
DualSingular eta1(const SectorDomain& d, const CharRoot& z1,
                  std::shared_ptr<const AngularProfile> phi1);

/// γ = 4 z1 (z1² - 1) ||φ1||² - 4 z1 ||φ1'||².
double extraction_constant(double z1, const AngularProfile& phi1);

}  // namespace itef
