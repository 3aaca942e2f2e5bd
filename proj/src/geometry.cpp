#include "itef/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace itef {

SectorDomain make_sector(double omega, double radius, double r0) {
  constexpr double eps = 1e-12;
  if (!(omega > eps) || !(omega < 2.0 * kPi - eps)) {
    throw std::invalid_argument("degenerate angle: omega must lie in (0, 2*pi)");
  }
  if (std::abs(omega - kPi) < eps) {
    throw std::invalid_argument("degenerate angle: omega = pi gives a smooth boundary point");
  }
  if (!(radius > 0.0) || !(r0 > 0.0)) {
    throw std::invalid_argument("radius and r0 must be positive");
  }
  if (!(2.0 * r0 < radius)) {
    throw std::invalid_argument("cutoff support 2*r0 must be smaller than the radius");
  }
  return SectorDomain{omega, radius, 0.5 * r0, 2.0 * r0};
}

Cutoff::Cutoff(double plateau, double support) : a_(plateau), b_(support) {
  if (!(plateau > 0.0) || !(support > plateau)) {
    throw std::invalid_argument("cutoff requires 0 < plateau < support");
  }
}

namespace {

constexpr int kBlendOrder = 8;

// Smoothstep of order n: t^{n+1} sum_k C(n+k, k) C(2n+1, n-k) (-t)^k, C^n at both ends.

Jet smoothstep(const Jet& t, int n) {
  Jet sum;
  double c = 1.0;
  Jet tk(1.0);
  for (int k = 0; k <= n; ++k) {
    double b1 = 1.0, b2 = 1.0;
    for (int i = 1; i <= k; ++i) b1 *= static_cast<double>(n + i) / i;
    for (int i = 1; i <= n - k; ++i) b2 *= static_cast<double>(n + k + 1 + i) / i;
    sum = sum + tk * (c * b1 * b2);
    tk = tk * t;
    c = -c;
  }
  Jet p(1.0);
  for (int i = 0; i <= n; ++i) p = p * t;
  return p * sum;
}

}  // namespace

Jet Cutoff::jet(double r) const {
  if (r <= a_) return Jet(1.0);
  if (r >= b_) return Jet{};
  const double h = b_ - a_;
  Jet t = Jet::variable(r);
  t = (t + (-a_)) * (1.0 / h);
  // S(t) + S(1 - t) = 1
  if (t.value() > 0.5) return smoothstep(1.0 - t, kBlendOrder);
  return 1.0 - smoothstep(t, kBlendOrder);
}

double Cutoff::eval(double r, int deriv_order) const {
  if (deriv_order < 0 || deriv_order > kJetOrder) {
    throw std::invalid_argument("cutoff derivative order must be in 0..4");
  }
  if (r <= a_) return deriv_order == 0 ? 1.0 : 0.0;
  if (r >= b_) return 0.0;
  return jet(r).derivs()[deriv_order];
}

Rule1D gauss_legendre(int n, double lo, double hi) {
  if (n < 1) throw std::invalid_argument("gauss_legendre needs n >= 1");
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

Rule1D graded_radial_rule(double r_max, const QuadratureOptions& opt, double band_lo,
                          double band_hi) {
  if (opt.panels < 1 || !(opt.grading > 0.0 && opt.grading < 1.0) || opt.radial_order < 1) {
    throw std::invalid_argument("invalid radial quadrature options");
  }
  std::vector<double> breaks{0.0};
  double r = r_max;
  for (int k = 0; k < opt.panels; ++k) r *= opt.grading;
  for (int k = 0; k <= opt.panels; ++k) {
    breaks.push_back(r);
    r /= opt.grading;
  }
  breaks.back() = r_max;
  for (double b : {band_lo, band_hi}) {
    if (b > 0.0 && b < r_max) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double x, double y) { return std::abs(x - y) <= 1e-15 * (1.0 + y); }),
               breaks.end());

  const Rule1D ref = gauss_legendre(opt.radial_order);
  Rule1D rule;
  auto add_panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      rule.nodes.push_back(mid + half * ref.nodes[i]);
      rule.weights.push_back(half * ref.weights[i]);
    }
  };
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double lo = breaks[p], hi = breaks[p + 1];
    const bool in_band = band_hi > band_lo && lo < band_hi && hi > band_lo;
    const int pieces = in_band ? std::max(1, opt.blend_refine) : 1;
    for (int s = 0; s < pieces; ++s) {
      add_panel(lo + (hi - lo) * s / pieces, lo + (hi - lo) * (s + 1) / pieces);
    }
  }
  return rule;
}

namespace {

std::string signature_of(const QuadratureOptions& opt, double r_max) {
  std::ostringstream os;
  os.precision(17);
  os << "P" << opt.panels << ";q" << opt.grading << ";nr" << opt.radial_order << ";na"
     << opt.angular_order << ";br" << opt.blend_refine << ";rmax" << r_max;
  return os.str();
}

}  // namespace

PolarQuadrature make_quadrature(const SectorDomain& d, const QuadratureOptions& opt) {
  PolarQuadrature q;
  q.radial = graded_radial_rule(d.radius, opt, d.cutoff_inner, d.cutoff_outer);
  q.angular = gauss_legendre(opt.angular_order, 0.0, d.omega);
  q.signature = signature_of(opt, d.radius);
  return q;
}

PolarQuadrature make_corner_quadrature(const SectorDomain& d, double eps,
                                       const QuadratureOptions& opt) {
  if (!(eps > 0.0) || eps > d.radius) {
    throw std::invalid_argument("corner radius must lie in (0, R]");
  }
  PolarQuadrature q;
  q.radial = graded_radial_rule(eps, opt, d.cutoff_inner, d.cutoff_outer);
  q.angular = gauss_legendre(opt.angular_order, 0.0, d.omega);
  q.signature = signature_of(opt, eps);
  return q;
}

double weighted_norm(const PolarSamples& u, int ell, double beta) {
  if (u.quadrature == nullptr) throw std::invalid_argument("samples carry no quadrature");
  if (ell < 0 || ell > kJetOrder) throw std::invalid_argument("ell must be in 0..4");
  const PolarQuadrature& q = *u.quadrature;
  double total = 0.0;
  for (int j = 0; j <= ell; ++j) {
    for (int k = 0; j + k <= ell; ++k) {
      auto it = u.values.find({j, k});
      if (it == u.values.end()) {
        throw std::invalid_argument("missing derivative samples for d_r^" + std::to_string(j) +
                                    " d_theta^" + std::to_string(k));
      }
      const std::vector<double>& v = it->second;
      if (v.size() != q.size()) throw std::invalid_argument("sample count mismatch");
      const double e = 2.0 * (beta - ell + j);
      double s = 0.0;
      for (std::size_t ir = 0; ir < q.radial.size(); ++ir) {
        const double rw = q.radial.weights[ir] * q.radial.nodes[ir] *
                          std::pow(q.radial.nodes[ir], e);
        double row = 0.0;
        for (std::size_t it2 = 0; it2 < q.angular.size(); ++it2) {
          const double x = v[q.index(ir, it2)];
          row += q.angular.weights[it2] * x * x;
        }
        s += rw * row;
      }
      total += s;
    }
  }
  return std::sqrt(total);
}

}  // namespace itef
