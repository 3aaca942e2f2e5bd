#pragma once

#include "itef/jet.hpp"

namespace itef {

/// Value, polar gradient, Laplacian and bilaplacian of a field at one point.
struct FieldValue {
  double u = 0.0;
  double ur = 0.0;
  double ut = 0.0;
  double lap = 0.0;
  double bilap = 0.0;

  FieldValue& add(const FieldValue& o, double s) {
    u += s * o.u;
    ur += s * o.ur;
    ut += s * o.ut;
    lap += s * o.lap;
    bilap += s * o.bilap;
    return *this;
  }
};

/// Radial Laplacian pieces of R(r)Θ(θ): Δu = P Θ + Q Θ'' with P = R'' + R'/r, Q = R/r².
inline double lap_p(const Derivs& R, double r) { return R[2] + R[1] / r; }
inline double lap_q(const Derivs& R, double r) { return R[0] / (r * r); }

/// Polar formulas for u = R(r) Θ(θ) with r > 0.
inline FieldValue separable_value(const Derivs& R, const Derivs& T, double r) {
  const double ir = 1.0 / r, ir2 = ir * ir;
  const double p = R[2] + R[1] * ir;
  const double dp = R[3] + R[2] * ir - R[1] * ir2;
  const double d2p = R[4] + R[3] * ir - 2.0 * R[2] * ir2 + 2.0 * R[1] * ir2 * ir;
  const double q = R[0] * ir2;
  const double dq = R[1] * ir2 - 2.0 * R[0] * ir2 * ir;
  const double d2q = R[2] * ir2 - 4.0 * R[1] * ir2 * ir + 6.0 * R[0] * ir2 * ir2;
  FieldValue v;
  v.u = R[0] * T[0];
  v.ur = R[1] * T[0];
  v.ut = R[0] * T[1];
  v.lap = p * T[0] + q * T[2];
  v.bilap = (d2p + dp * ir) * T[0] + (p * ir2 + d2q + dq * ir) * T[2] + q * ir2 * T[4];
  return v;
}

}  // namespace itef
