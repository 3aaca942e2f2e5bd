#pragma once

// Independent reference computations for the tests: nothing here calls into the library.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Root of sin ω - ω cos ω (same zero as tan ω = ω, no pole) in (π, 3π/2).
inline double tan_fixed_point_bisection() {
  double lo = kPi + 1e-9, hi = 1.5 * kPi - 1e-9;
  auto f = [](double w) { return std::sin(w) - w * std::cos(w); };
  for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(lo) < 0) == (f(mid) < 0) ? lo = mid : hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// k-th positive zero of J_nu by scanning and bisection.
inline double bessel_zero(double nu, int k) {
  auto j = [nu](double x) { return std::cyl_bessel_j(nu, x); };
  double a = 0.5, step = 0.05;
  int found = 0;
  while (true) {
    const double b = a + step;
    if ((j(a) < 0) != (j(b) < 0)) {
      if (++found == k) {
        double lo = a, hi = b;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          (j(lo) < 0) == (j(mid) < 0) ? lo = mid : hi = mid;
        }
        return 0.5 * (lo + hi);
      }
    }
    a = b;
  }
}

/// 13-point second-order stencil for Δ²u at (x, y).
inline double fd_bilaplacian(const std::function<double(double, double)>& u, double x, double y, double h) {
  const double c = 20.0 * u(x, y);
  const double axis = u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h);
  const double diag = u(x + h, y + h) + u(x - h, y + h) + u(x + h, y - h) + u(x - h, y - h);
  const double far = u(x + 2 * h, y) + u(x - 2 * h, y) + u(x, y + 2 * h) + u(x, y - 2 * h);
  return (c - 8.0 * axis + 2.0 * diag + far) / (h * h * h * h);
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(std::abs(y[i]));
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Real double zero of G(z, ω) = sin²(zω) - z² sin²ω: Newton on (G, ∂G/∂z) = 0
/// with a finite-difference Jacobian, from the starting guess (z, ω).
inline std::pair<double, double> double_root(double z, double w) {
  auto G = [](double z, double w) { return std::pow(std::sin(z * w), 2) - z * z * std::pow(std::sin(w), 2); };
  auto Gz = [](double z, double w) { return w * std::sin(2 * z * w) - 2 * z * std::pow(std::sin(w), 2); };
  for (int it = 0; it < 50; ++it) {
    const double h = 1e-7;
    const double f1 = G(z, w), f2 = Gz(z, w);
    const double a = (G(z + h, w) - G(z - h, w)) / (2 * h), b = (G(z, w + h) - G(z, w - h)) / (2 * h);
    const double c = (Gz(z + h, w) - Gz(z - h, w)) / (2 * h), d = (Gz(z, w + h) - Gz(z, w - h)) / (2 * h);
    const double det = a * d - b * c;
    if (det == 0.0) break;
    z -= (d * f1 - b * f2) / det;
    w -= (-c * f1 + a * f2) / det;
  }
  return {z, w};
}

/// Gauss-Legendre-free reference quadrature: composite Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace oracle
