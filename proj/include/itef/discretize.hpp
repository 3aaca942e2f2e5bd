#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "itef/angular.hpp"
#include "itef/charroots.hpp"
#include "itef/field.hpp"
#include "itef/geometry.hpp"

namespace itef {

/// Clamped bubbles (1-x²)² C_k^{(9/2)}(x) vanish with their first derivative at ±1;
/// Dirichlet bubbles (1-x²) C_k^{(5/2)}(x) vanish to first order.
enum class BubbleFamily { Clamped, Dirichlet };

/// L²(-1, 1)-normalized bubble as a jet in its argument.
Jet bubble(BubbleFamily family, int k, const Jet& x);

struct RadialFn {
  enum class Kind { Bubble, Singular };
  Kind kind = Kind::Bubble;
  // Bubble in x = 2r/R - 1
  BubbleFamily family = BubbleFamily::Clamped;
  int degree = 0;
  double length = 1.0;
  // Singular: χ(r) r^p (log r)^log_power
  double exponent = 0.0;
  int log_power = 0;
  double cut_a = 0.0, cut_b = 0.0;

  Jet jet(double r) const;
  Derivs derivs(double r) const { return jet(r).derivs(); }
  /// Zero for r >= support().
  double support() const { return kind == Kind::Singular ? cut_b : length; }
  std::string key() const;
};

struct AngularFn {
  enum class Kind { Bubble, Profile, Associated, Sine };
  Kind kind = Kind::Bubble;
  BubbleFamily family = BubbleFamily::Clamped;
  int degree = 0;
  double omega = 0.0;
  std::shared_ptr<const AngularProfile> profile;
  std::shared_ptr<const AssociatedProfile> associated;
  double frequency = 0.0;  // Sine: sin(frequency θ)

  Derivs derivs(double t) const;
  std::string key() const;
};

struct Term {
  int radial = 0;
  int angular = 0;
  double coef = 1.0;
};

struct BasisFunction {
  std::vector<Term> terms;
  bool enriched = false;
  std::string label;
};

/// Tensor basis R_i(r)Θ_j(θ), index i * n_theta + j, followed by the enrichment functions.
struct DiscreteSpace {
  SectorDomain domain;
  int n_r = 0;
  int n_theta = 0;
  bool dirichlet = false;
  std::vector<RadialFn> radial;
  std::vector<AngularFn> angular;
  std::vector<BasisFunction> basis;
  std::vector<CharRoot> enrichment;
  double gram_ratio = 0.0;  // min/max eigenvalue of the diagonally scaled mass matrix

  std::size_t dimension() const { return basis.size(); }
  std::size_t smooth_dimension() const { return static_cast<std::size_t>(n_r) * n_theta; }
  FieldValue evaluate(std::size_t i, double r, double theta) const;
  FieldValue evaluate_field(const Eigen::VectorXd& x, double r, double theta) const;
  /// Canonical description of the basis, used in cache keys.
  std::string key() const;
};

/// Real roots with Re z in (0, 1): both simple roots for ω in (ω0, 2π), the single root
/// below ω0. Empty for convex sectors.
std::vector<CharRoot> default_enrichment(double omega);

/// Throws std::invalid_argument on bad sizes or roots that are complex or outside (0, 2),
/// NumericalError when the scaled Gram matrix is too ill-conditioned.
/// Each enrichment member χ r^{1+z} φ is stored minus its L² projection onto the tensor
/// block, so its coefficient in an expansion is unchanged and the mass matrix stays
/// well conditioned.
DiscreteSpace build_space(const SectorDomain& d, int n_r, int n_theta,
                          const std::vector<CharRoot>& enrich,
                          const QuadratureOptions& opt = {});

/// H¹₀-conforming space for the Dirichlet Laplacian, enriched with χ r^{π/ω} sin(πθ/ω)
/// (orthogonalized the same way) when π/ω is not an integer.
DiscreteSpace build_dirichlet_space(const SectorDomain& d, int n_r, int n_theta,
                                    const QuadratureOptions& opt = {});

struct OperatorBundle {
  Eigen::MatrixXd A;  // ∫ Δu Δv
  Eigen::MatrixXd S;  // ∫ ∇u·∇v
  Eigen::MatrixXd M;  // ∫ u v
  std::shared_ptr<const DiscreteSpace> space;
  PolarQuadrature quadrature;
  bool enriched = false;
  bool from_cache = false;

  std::size_t dimension() const { return static_cast<std::size_t>(M.rows()); }
};

OperatorBundle assemble(std::shared_ptr<const DiscreteSpace> space, const PolarQuadrature& q);

struct QuadratureCheck {
  double max_change = 0.0;  // max over entries of |Δ entry| / sqrt(diag_i diag_j)
  bool converged = false;
};

/// Repeats the assembly with doubled radial and angular orders.
QuadratureCheck check_quadrature_convergence(std::shared_ptr<const DiscreteSpace> space,
                                             const QuadratureOptions& opt, double tol = 1e-10);

using Source = std::function<double(double r, double theta)>;

/// ∫ f φ_i over the bundle's quadrature.
Eigen::VectorXd load_vector(const OperatorBundle& b, const Source& f);

/// Solves A x = load; throws NumericalError if the relative residual exceeds 1e-10.
Eigen::VectorXd solve_clamped_biharmonic(const OperatorBundle& b, const Eigen::VectorXd& load);
Eigen::VectorXd solve_clamped_biharmonic(const OperatorBundle& b, const Source& f);

/// Smallest generalized eigenvalue of (S, M) on the Dirichlet space.
double dirichlet_lambda1(const SectorDomain& d, int n_r, int n_theta,
                         const QuadratureOptions& opt = {});

}  // namespace itef
