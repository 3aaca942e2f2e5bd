#pragma once

// Truncated Taylor arithmetic up to fourth order. Coefficients are stored
// as c[k] = f^(k)(x0) / k!, so products are plain Cauchy products.

#include <array>
#include <cmath>

namespace itef {

inline constexpr int kJetOrder = 4;

/// Derivatives f, f', f'', f''', f'''' at one point.
using Derivs = std::array<double, kJetOrder + 1>;

class Jet {
 public:
  constexpr Jet() = default;
  constexpr explicit Jet(double value) { c_[0] = value; }

  /// The identity jet: x expanded around x0.
  static constexpr Jet variable(double x0) {
    Jet j(x0);
    j.c_[1] = 1.0;
    return j;
  }

  static Jet from_derivs(const Derivs& d) {
    Jet j;
    double fact = 1.0;
    for (int k = 0; k <= kJetOrder; ++k) {
      if (k > 0) fact *= k;
      j.c_[k] = d[k] / fact;
    }
    return j;
  }

  constexpr double operator[](int k) const { return c_[k]; }
  constexpr double& operator[](int k) { return c_[k]; }
  constexpr double value() const { return c_[0]; }

  Derivs derivs() const {
    Derivs d{};
    double fact = 1.0;
    for (int k = 0; k <= kJetOrder; ++k) {
      if (k > 0) fact *= k;
      d[k] = c_[k] * fact;
    }
    return d;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k <= kJetOrder; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k <= kJetOrder; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator-(double s, const Jet& a) {
    Jet r = a * -1.0;
    r.c_[0] += s;
    return r;
  }
  friend Jet operator-(const Jet& a) { return a * -1.0; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= kJetOrder; ++k) {
      double s = 0.0;
      for (int i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
      r.c_[k] = s;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= kJetOrder; ++k) {
      double s = a.c_[k];
      for (int i = 1; i <= k; ++i) s -= b.c_[i] * r.c_[k - i];
      r.c_[k] = s / b.c_[0];
    }
    return r;
  }

  friend Jet exp(const Jet& a) {
    Jet r;
    r.c_[0] = std::exp(a.c_[0]);
    for (int k = 1; k <= kJetOrder; ++k) {
      double s = 0.0;
      for (int i = 1; i <= k; ++i) s += i * a.c_[i] * r.c_[k - i];
      r.c_[k] = s / k;
    }
    return r;
  }

  friend Jet log(const Jet& a) {
    Jet r;
    r.c_[0] = std::log(a.c_[0]);
    for (int k = 1; k <= kJetOrder; ++k) {
      double s = k * a.c_[k];
      for (int i = 1; i < k; ++i) s -= i * r.c_[i] * a.c_[k - i];
      r.c_[k] = s / (k * a.c_[0]);
    }
    return r;
  }

  /// x^p for x > 0.
  friend Jet pow(const Jet& a, double p) { return exp(log(a) * p); }

  /// (x0 + h)^p, with the binomial series coefficients computed directly.
  static Jet power(double x0, double p) {
    Jet r;
    double binom = 1.0;
    for (int k = 0; k <= kJetOrder; ++k) {
      if (k > 0) binom *= (p - (k - 1)) / k;
      r.c_[k] = binom * std::pow(x0, p - k);
    }
    return r;
  }

 private:
  std::array<double, kJetOrder + 1> c_{};
};

}  // namespace itef
