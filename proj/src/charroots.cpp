#include "itef/charroots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "itef/geometry.hpp"

namespace itef {

namespace {

// Basis functions depend on z only through a = 1 ± z; the helpers below give
// column entries and their a-derivatives of order m.

// cos(aθ) and d/dθ, differentiated m times in a.
cplx cos_col(cplx a, double t, int m) {
  const cplx u = a * t;
  switch (m) {
    case 0: return std::cos(u);
    case 1: return -t * std::sin(u);
    default: return -t * t * std::cos(u);
  }
}
cplx dcos_col(cplx a, double t, int m) {
  const cplx u = a * t;
  switch (m) {
    case 0: return -a * std::sin(u);
    case 1: return -std::sin(u) - u * std::cos(u);
    default: return -2.0 * t * std::cos(u) + a * t * t * std::sin(u);
  }
}

// sinc(u) = sin(u)/u and its first two u-derivatives.
cplx sinc_d(cplx u, int m, bool series) {
  if (series || std::abs(u) < 0.5) {
    // Σ_k (-1)^k u^{2k} / (2k+1)!, differentiated termwise.
    const cplx u2 = u * u;
    cplx sum = 0.0;
    cplx u2k = 1.0;   // u^{2k}
    cplx lower = 1.0; // u^{2k-m} for the active derivative
    double fact = 1.0;
    for (int k = 0; k < 30; ++k) {
      if (k > 0) fact *= (2.0 * k) * (2.0 * k + 1.0);
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      if (m == 0) {
        sum += sign * u2k / fact;
      } else if (k >= 1) {
        // u^{2k-1} = u^{2k-2} u,  u^{2k-2} = lower (tracked from k = 1)
        const cplx base = lower;
        if (m == 1) sum += sign * (2.0 * k) * base * u / fact;
        else sum += sign * (2.0 * k) * (2.0 * k - 1.0) * base / fact;
        lower *= u2;
      }
      u2k *= u2;
      if (k > 3 && std::abs(u2k) / fact < 1e-20) break;
    }
    return sum;
  }
  const cplx s = std::sin(u), c = std::cos(u);
  switch (m) {
    case 0: return s / u;
    case 1: return (u * c - s) / (u * u);
    default: return -s / u - 2.0 * c / (u * u) + 2.0 * s / (u * u * u);
  }
}

// sin(aθ)/a = θ sinc(aθ); d/dθ = cos(aθ).
cplx ssin_col(cplx a, double t, int m, bool series) {
  if (t == 0.0) return 0.0;
  const cplx u = a * t;
  switch (m) {
    case 0: return t * sinc_d(u, 0, series);
    case 1: return t * t * sinc_d(u, 1, series);
    default: return t * t * t * sinc_d(u, 2, series);
  }
}
cplx dssin_col(cplx a, double t, int m) {
  const cplx u = a * t;
  switch (m) {
    case 0: return std::cos(u);
    case 1: return -t * std::sin(u);
    default: return -t * t * std::cos(u);
  }
}

Eigen::Matrix4cd build(cplx z, double omega, int m, bool force_series) {
  Eigen::Matrix4cd M;
  const cplx ap = 1.0 + z, am = 1.0 - z;
  const double sp = 1.0;                       // (da/dz)^m for a = 1 + z
  const double sm = (m % 2 == 0) ? 1.0 : -1.0;  // (da/dz)^m for a = 1 - z
  const double ts[2] = {0.0, omega};
  for (int e = 0; e < 2; ++e) {
    const double t = ts[e];
    M(2 * e, 0) = sp * cos_col(ap, t, m);
    M(2 * e + 1, 0) = sp * dcos_col(ap, t, m);
    M(2 * e, 1) = sp * ssin_col(ap, t, m, false);
    M(2 * e + 1, 1) = sp * dssin_col(ap, t, m);
    M(2 * e, 2) = sm * cos_col(am, t, m);
    M(2 * e + 1, 2) = sm * dcos_col(am, t, m);
    M(2 * e, 3) = sm * ssin_col(am, t, m, force_series);
    M(2 * e + 1, 3) = sm * dssin_col(am, t, m);
  }
  return M;
}

}  // namespace

Eigen::Matrix4cd char_matrix(cplx z, double omega, bool force_series) {
  return build(z, omega, 0, force_series);
}

Eigen::Matrix4cd char_matrix_dz(cplx z, double omega, int order, bool force_series) {
  return build(z, omega, order, force_series);
}

cplx char_det_degenerate(cplx z, double omega) {
  return char_matrix(z, omega, true).determinant();
}

cplx char_det(cplx z, double omega) {
  if (std::abs(z - 1.0) < kDegenerateSwitch) return char_det_degenerate(z, omega);
  return char_matrix(z, omega, false).determinant();
}

cplx char_det_derivative(cplx z, double omega, int order) {
  const bool series = std::abs(z - 1.0) < kDegenerateSwitch;
  const Eigen::Matrix4cd M0 = char_matrix(z, omega, series);
  if (order == 0) return M0.determinant();
  const Eigen::Matrix4cd M1 = char_matrix_dz(z, omega, 1, series);
  cplx sum = 0.0;
  if (order == 1) {
    for (int k = 0; k < 4; ++k) {
      Eigen::Matrix4cd T = M0;
      T.col(k) = M1.col(k);
      sum += T.determinant();
    }
    return sum;
  }
  if (order != 2) throw std::invalid_argument("char_det_derivative supports order 0..2");
  const Eigen::Matrix4cd M2 = char_matrix_dz(z, omega, 2, series);
  for (int k = 0; k < 4; ++k) {
    Eigen::Matrix4cd T = M0;
    T.col(k) = M2.col(k);
    sum += T.determinant();
    for (int l = k + 1; l < 4; ++l) {
      Eigen::Matrix4cd U = M0;
      U.col(k) = M1.col(k);
      U.col(l) = M1.col(l);
      sum += 2.0 * U.determinant();
    }
  }
  return sum;
}

cplx closed_form_char(cplx z, double omega) {
  const cplx s = std::sin(z * omega);
  const double so = std::sin(omega);
  return s * s - z * z * so * so;
}

int RootSearchResult::count_with_multiplicity() const {
  int n = 0;
  for (const auto& r : roots) n += r.multiplicity;
  return n;
}

std::vector<CharRoot> RootSearchResult::real_roots_in(double lo, double hi) const {
  std::vector<CharRoot> out;
  for (const auto& r : roots) {
    if (r.is_real && r.z.real() > lo && r.z.real() < hi) out.push_back(r);
  }
  return out;
}

namespace {

struct Rect {
  double a, b, y;
};

using Moments = std::vector<cplx>;

// Adaptive Gauss panels on one contour side; returns false when the budget runs out.
bool side_moments(double omega, cplx z0, cplx z1, const Rule1D& g, cplx c, double rho, int kmax,
                  double tol, int& budget, Moments& out, const Moments* whole = nullptr,
                  int depth = 0) {
  auto panel = [&](cplx a, cplx b) {
    Moments m(kmax + 1, 0.0);
    const cplx dz = b - a;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const cplx z = a + dz * g.nodes[i];
      const cplx base = char_det_derivative(z, omega, 1) / char_det_derivative(z, omega, 0) * dz *
                        g.weights[i];
      cplx zeta = 1.0;
      const cplx zs = (z - c) / rho;
      for (int k = 0; k <= kmax; ++k) {
        m[k] += zeta * base;
        zeta *= zs;
      }
    }
    budget -= static_cast<int>(g.size());
    return m;
  };
  const Moments coarse = whole ? *whole : panel(z0, z1);
  const cplx mid = 0.5 * (z0 + z1);
  const Moments left = panel(z0, mid), right = panel(mid, z1);
  double err = 0.0;
  for (int k = 0; k <= kmax; ++k) err = std::max(err, std::abs(left[k] + right[k] - coarse[k]));
  if (err < tol || depth >= 48) {
    for (int k = 0; k <= kmax; ++k) out[k] += left[k] + right[k];
    return err < tol;
  }
  if (budget <= 0) return false;
  return side_moments(omega, z0, mid, g, c, rho, kmax, 0.5 * tol, budget, out, &left, depth + 1) &&
         side_moments(omega, mid, z1, g, c, rho, kmax, 0.5 * tol, budget, out, &right, depth + 1);
}

// (1/2πi) ∮ ((z - c)/ρ)^k D'/D dz for k = 0..kmax. Empty when the integrand is too
// singular on the contour to resolve within opt.max_points evaluations per side.
Moments contour_moments(double omega, const Rect& R, int kmax, const RootSearchOptions& opt) {
  const Rule1D g = gauss_legendre(opt.base_points, 0.0, 1.0);
  const cplx corners[5] = {{R.a, -R.y}, {R.b, -R.y}, {R.b, R.y}, {R.a, R.y}, {R.a, -R.y}};
  const cplx c(0.5 * (R.a + R.b), 0.0);
  const double rho = std::hypot(0.5 * (R.b - R.a), R.y);
  Moments mom(kmax + 1, 0.0);
  for (int s = 0; s < 4; ++s) {
    int budget = opt.max_points;
    if (!side_moments(omega, corners[s], corners[s + 1], g, c, rho, kmax, 1e-9, budget, mom)) {
      return {};
    }
  }
  const cplx norm(0.0, 2.0 * kPi);
  for (auto& m : mom) m /= norm;
  return mom;
}

double near_integer_gap(cplx w) {
  return std::max(std::abs(w.real() - std::round(w.real())), std::abs(w.imag()));
}

// Winding number; NaN if the integral does not resolve to an integer.
double settled_winding(double omega, const Rect& R, const RootSearchOptions& opt) {
  const Moments m = contour_moments(omega, R, 0, opt);
  if (m.empty() || near_integer_gap(m[0]) >= opt.integer_tol) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::round(m[0].real());
}

struct Polished {
  cplx z;
  bool converged;
  double ratio;
};

Polished newton(cplx z, double omega, bool real_only, int deriv = 0) {
  double last = 0.0, prev = 0.0;
  bool converged = false;
  for (int it = 0; it < 80; ++it) {
    cplx f = char_det_derivative(z, omega, deriv);
    cplx df = char_det_derivative(z, omega, deriv + 1);
    if (real_only) {
      f = f.real();
      df = df.real();
    }
    if (std::abs(df) == 0.0) break;
    cplx step = f / df;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
    if (std::abs(step) > 0.5) step *= 0.5 / std::abs(step);
    z -= step;
    prev = last;
    last = std::abs(step);
    if (last <= 4e-16 * (1.0 + std::abs(z))) {
      converged = true;
      break;
    }
  }
  const double ratio = prev > 0.0 ? last / prev : 0.0;
  return {z, converged || ratio < 0.1, ratio};
}

CharRoot polish(cplx z, double omega, const RootSearchOptions& opt) {
  Polished p = newton(z, omega, false);
  if (std::abs(p.z.imag()) < 1e-9 * (1.0 + std::abs(p.z))) {
    p = newton(cplx(p.z.real(), 0.0), omega, true);
    p.z = cplx(p.z.real(), 0.0);
  }
  CharRoot root;
  root.z = p.z;
  root.newton_ratio = p.ratio;
  root.residual = std::abs(char_det_derivative(p.z, omega, 0));
  root.derivative_residual = std::abs(char_det_derivative(p.z, omega, 1));

  // A stalled, linearly converging Newton run can hide a double root: try
  // the simple zero of D' nearby and accept it if D vanishes there as well.
  const bool real = p.z.imag() == 0.0;
  Polished q = newton(p.z, omega, real, 1);
  if (real || std::abs(q.z.imag()) < 1e-9 * (1.0 + std::abs(q.z))) q.z = cplx(q.z.real(), 0.0);
  const double d0 = std::abs(char_det_derivative(q.z, omega, 0));
  const double d1 = std::abs(char_det_derivative(q.z, omega, 1));
  if (std::abs(q.z - p.z) < 1e-4 && d0 < opt.tol && d1 < opt.double_root_threshold) {
    root.z = q.z;
    root.multiplicity = 2;
    root.residual = d0;
    root.derivative_residual = d1;
    root.newton_ratio = q.ratio;
  } else if (root.derivative_residual < opt.double_root_threshold) {
    root.multiplicity = 2;
  }
  root.is_real = root.z.imag() == 0.0;
  root.strip_position = root.z.real();
  return root;
}

std::vector<cplx> moment_roots(const std::vector<cplx>& s, int n, const Rect& R) {
  // Newton identities turn power sums into the monic polynomial's coefficients.
  std::vector<cplx> e(n + 1, 0.0);
  e[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    cplx acc = 0.0;
    for (int i = 1; i <= k; ++i) {
      const double sign = (i % 2 == 1) ? 1.0 : -1.0;
      acc += sign * e[k - i] * s[i];
    }
    e[k] = acc / static_cast<double>(k);
  }
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int k = 1; k <= n; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    C(n - k, n - 1) = sign * e[k];
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  const cplx c(0.5 * (R.a + R.b), 0.0);
  const double rho = std::hypot(0.5 * (R.b - R.a), R.y);
  std::vector<cplx> out;
  for (int i = 0; i < n; ++i) out.push_back(c + rho * es.eigenvalues()[i]);
  return out;
}

bool inside(const Rect& R, cplx z) {
  return z.real() > R.a && z.real() < R.b && std::abs(z.imag()) < R.y;
}

void add_unique(std::vector<CharRoot>& roots, const CharRoot& r) {
  for (auto& e : roots) {
    if (std::abs(e.z - r.z) < 1e-7 * (1.0 + std::abs(r.z))) {
      e.multiplicity = std::max(e.multiplicity, r.multiplicity);
      return;
    }
  }
  roots.push_back(r);
}

int total(const std::vector<CharRoot>& roots) {
  int n = 0;
  for (const auto& r : roots) n += r.multiplicity;
  return n;
}

}  // namespace

double winding_number(double omega, double a, double b, double y, const RootSearchOptions& opt) {
  return settled_winding(omega, Rect{a, b, y}, opt);
}

RootSearchResult find_roots(double omega, const RootSearchOptions& opt) {
  if (!(opt.re_max > opt.re_min) || !(opt.tol > 0.0)) {
    throw std::invalid_argument("find_roots: invalid strip or tolerance");
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);

  Rect R{opt.re_min + opt.left_margin, opt.re_max, 0.5};
  int shifts = 0;
  double count = std::numeric_limits<double>::quiet_NaN();
  for (;;) {
    bool ok = true;
    double y = 0.5;
    double c_prev = std::numeric_limits<double>::quiet_NaN();
    int stable = 0;
    for (; y <= opt.max_im_extent; y *= 2.0) {
      R.y = y;
      const double c = settled_winding(omega, R, opt);
      if (std::isnan(c)) {
        ok = false;
        break;
      }
      if (c == c_prev) {
        if (++stable >= 2) {
          count = c;
          break;
        }
      } else {
        stable = 0;
      }
      c_prev = c;
      count = c;
    }
    if (ok) break;
    if (++shifts > opt.max_shifts) {
      throw NumericalError("contour passes near root: winding number did not settle after " +
                           std::to_string(opt.max_shifts) + " shifts");
    }
    R.a = opt.re_min + opt.left_margin * (1.0 + 0.25 * jitter(rng));
    R.b = opt.re_max + 2e-3 * jitter(rng);
  }
  if (R.y > opt.max_im_extent) R.y = opt.max_im_extent;

  const int n_expected = static_cast<int>(count);
  std::vector<CharRoot> roots;
  auto consider = [&](cplx guess) {
    CharRoot r = polish(guess, omega, opt);
    if (inside(R, r.z) && r.residual < opt.tol) add_unique(roots, r);
  };

  if (n_expected > 0) {
    const auto mom = contour_moments(omega, R, n_expected, opt);
    if (!mom.empty()) {
      for (cplx z0 : moment_roots(mom, n_expected, R)) consider(z0);
    }
  }
  if (total(roots) != n_expected) {
    // Real axis brackets, then a coarse grid of starting points.
    const int ns = 800;
    double prev_x = R.a, prev_f = char_det(R.a, omega).real();
    for (int i = 1; i <= ns; ++i) {
      const double x = R.a + (R.b - R.a) * i / ns;
      const double f = char_det(x, omega).real();
      if ((f < 0) != (prev_f < 0)) consider(0.5 * (x + prev_x));
      prev_x = x;
      prev_f = f;
    }
  }
  if (total(roots) != n_expected) {
    for (int i = 0; i < 24; ++i) {
      for (int j = 0; j < 24; ++j) {
        consider(cplx(R.a + (R.b - R.a) * (i + 0.5) / 24.0, -R.y + 2.0 * R.y * (j + 0.5) / 24.0));
      }
    }
  }
  std::sort(roots.begin(), roots.end(), [](const CharRoot& x, const CharRoot& y) {
    if (x.z.real() != y.z.real()) return x.z.real() < y.z.real();
    return x.z.imag() < y.z.imag();
  });

  RootSearchResult res;
  res.roots = std::move(roots);
  res.winding_count = n_expected;
  res.im_extent = R.y;
  res.left_edge = R.a;
  res.right_edge = R.b;
  res.shifts = shifts;
  if (res.count_with_multiplicity() != n_expected) {
    throw RootCountMismatch("count mismatch: argument principle gives " + std::to_string(n_expected) +
                            ", polished roots give " +
                            std::to_string(res.count_with_multiplicity()));
  }
  return res;
}

OmegaThreshold compute_omega0(double tol) {
  // sin ω - ω cos ω has the same root and no pole in (π, 3π/2).
  auto g = [](double w) { return std::sin(w) - w * std::cos(w); };
  double lo = kPi, hi = 1.5 * kPi;
  while (hi - lo > std::max(tol, 1e-15)) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if ((g(mid) > 0) == (g(lo) > 0)) lo = mid; else hi = mid;
  }
  double w = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const double dg = w * std::sin(w);
    if (dg == 0.0) break;
    w -= g(w) / dg;
  }
  return {w, std::abs(std::tan(w) - w)};
}

}  // namespace itef
