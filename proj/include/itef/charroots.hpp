#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace itef {

using cplx = std::complex<double>;

/// Raised when a computed quantity fails its own verification (exit code 2 in the CLI).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RootCountMismatch : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A zero of the clamped characteristic determinant.
struct CharRoot {
  cplx z{};
  int multiplicity = 1;
  double residual = 0.0;             // |det M(z, ω)|
  double derivative_residual = 0.0;  // |d/dz det M(z, ω)|
  bool is_real = false;
  double strip_position = 0.0;       // Re z
  double newton_ratio = 0.0;         // |last correction| / |previous correction|
};

struct OmegaThreshold {
  double omega0 = 0.0;
  double residual = 0.0;  // |tan ω0 - ω0|
};

/// |z - 1| below this switches to the series evaluation of the sin((1-z)θ)/(1-z) column.
inline constexpr double kDegenerateSwitch = 1e-3;

/// Clamped conditions φ(0)=φ'(0)=φ(ω)=φ'(ω)=0 applied to the solution basis
/// {cos((1+z)θ), sin((1+z)θ)/(1+z), cos((1-z)θ), sin((1-z)θ)/(1-z)}.
/// Rows are the four conditions, columns the basis functions.
Eigen::Matrix4cd char_matrix(cplx z, double omega, bool force_series = false);

/// d/dz of char_matrix, column by column.
Eigen::Matrix4cd char_matrix_dz(cplx z, double omega, int order = 1, bool force_series = false);

/// det of char_matrix. Routes |z - 1| < kDegenerateSwitch to char_det_degenerate.
cplx char_det(cplx z, double omega);

/// Same determinant evaluated with the series form of the degenerate column,
/// which reduces to the basis {cos 2θ, sin 2θ / 2, 1, θ} at z = 1.
cplx char_det_degenerate(cplx z, double omega);

/// d^order/dz^order det M(z, ω), order in 0..2 (product rule over columns).
cplx char_det_derivative(cplx z, double omega, int order);

/// sin²(zω) - z² sin²(ω). Equals -(z² - 1)/4 · char_det(z, ω).
cplx closed_form_char(cplx z, double omega);

struct RootSearchOptions {
  double re_min = 0.0;
  double re_max = 2.0;
  double tol = 1e-10;                     // residual acceptance
  double left_margin = 0.02;              // contour stays clear of the z = 0 double zero
  double double_root_threshold = 1e-7;    // |D'| below this marks multiplicity 2
  int base_points = 16;                   // Gauss points per adaptive panel
  int max_points = 16384;                 // evaluation budget per rectangle side
  double integer_tol = 1e-3;
  double max_im_extent = 16.0;
  int max_shifts = 5;
  std::uint64_t seed = 1;
};

struct RootSearchResult {
  std::vector<CharRoot> roots;
  int winding_count = 0;     // argument-principle count with multiplicity
  double im_extent = 0.0;    // final half-height of the contour
  double left_edge = 0.0;
  double right_edge = 0.0;
  int shifts = 0;            // contour perturbations that were needed

  int count_with_multiplicity() const;
  std::vector<CharRoot> real_roots_in(double lo, double hi) const;
};

/// Winding number of det M(·, ω) around the rectangle [a, b] × [-y, y];
/// returns NaN when the integral does not settle to an integer.
double winding_number(double omega, double a, double b, double y, const RootSearchOptions& opt);

/// All roots with Re z in the strip, certified by the argument principle and
/// polished by Newton's method. Throws RootCountMismatch if the counts disagree.
RootSearchResult find_roots(double omega, const RootSearchOptions& opt = {});

/// Root of tan ω = ω in (π, 3π/2).
OmegaThreshold compute_omega0(double tol = 1e-15);

}  // namespace itef
