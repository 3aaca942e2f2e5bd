#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "itef/jet.hpp"

namespace itef {

inline constexpr double kPi = 3.14159265358979323846;

/// Pac-man domain {0 < θ < ω, 0 < r < R} with the cutoff band [r0/2, 2 r0].
/// Vertex at the origin, straight edges at θ = 0 and θ = ω, circular arc at r = R.
struct SectorDomain {
  double omega = 0.0;
  double radius = 1.0;
  double cutoff_inner = 0.0;
  double cutoff_outer = 0.0;

  double area() const { return 0.5 * omega * radius * radius; }
  bool convex() const { return omega < kPi; }
};

/// Validates the parameters; throws std::invalid_argument on
/// ω ∈ {0, π, 2π} or outside (0, 2π), non-positive lengths, or 2 r0 >= R.
SectorDomain make_sector(double omega, double radius, double r0);

/// Smooth radial cutoff: 1 on [0, a], 0 on [b, ∞), C⁸ polynomial smoothstep between.
class Cutoff {
 public:
  Cutoff(double plateau, double support);
  explicit Cutoff(const SectorDomain& d) : Cutoff(d.cutoff_inner, d.cutoff_outer) {}

  double plateau() const { return a_; }
  double support() const { return b_; }

  /// χ^(k)(r) for k in 0..4. Returns literal 1/0 outside the blend band.
  double eval(double r, int deriv_order = 0) const;
  Jet jet(double r) const;

 private:
  double a_;
  double b_;
};

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [lo, hi].
Rule1D gauss_legendre(int n, double lo = -1.0, double hi = 1.0);

struct QuadratureOptions {
  int panels = 40;          // geometric panels [R q^{k+1}, R q^k] plus [0, R q^panels]
  double grading = 0.5;     // q
  int radial_order = 32;    // Gauss points per radial panel
  int angular_order = 64;   // Gauss points on (0, ω)
  int blend_refine = 4;     // sub-panels for panels overlapping the cutoff band
};

/// Tensor rule on the sector. Node (i, j) has weight
/// radial.weights[i] * radial.nodes[i] * angular.weights[j] (polar Jacobian included).
struct PolarQuadrature {
  Rule1D radial;   // plain dr weights
  Rule1D angular;  // plain dθ weights
  std::string signature;

  std::size_t size() const { return radial.size() * angular.size(); }
  std::size_t index(std::size_t ir, std::size_t it) const { return ir * angular.size() + it; }
  double weight(std::size_t ir, std::size_t it) const {
    return radial.weights[ir] * radial.nodes[ir] * angular.weights[it];
  }
};

/// Geometric radial grading on [0, r_max] (graded toward r = 0), Gauss on each panel.
/// Panels that overlap [band_lo, band_hi] are split into `blend_refine` pieces.
Rule1D graded_radial_rule(double r_max, const QuadratureOptions& opt, double band_lo = -1.0,
                          double band_hi = -1.0);

PolarQuadrature make_quadrature(const SectorDomain& d, const QuadratureOptions& opt = {});

/// Rule on the corner piece D ∩ B(0, eps).
PolarQuadrature make_corner_quadrature(const SectorDomain& d, double eps,
                                       const QuadratureOptions& opt = {});

/// Polar derivatives ∂_r^j ∂_θ^k u sampled at the nodes of a PolarQuadrature.
struct PolarSamples {
  const PolarQuadrature* quadrature = nullptr;
  std::map<std::pair<int, int>, std::vector<double>> values;

  void set(int j, int k, std::vector<double> v) { values[{j, k}] = std::move(v); }
  bool has(int j, int k) const { return values.count({j, k}) != 0; }
};

/// V^ell_beta(D) norm through its polar characterization:
/// sum over j + k <= ell of || r^{beta - ell + j} ∂_r^j ∂_θ^k u ||^2.
/// Throws std::invalid_argument when a needed derivative sample is missing.
double weighted_norm(const PolarSamples& u, int ell, double beta);

}  // namespace itef
