#pragma once

// Closed-form segment formulas shared by the scalar evaluation path and the
// scalar kernel table. The AVX2 kernels replicate the exact operation order so
// both paths round identically.

namespace rsg::detail {

inline double affine_at(double s, double start, double v0, double slope) {
  return v0 + slope * (s - start);
}

// c[0] + c[1] s + c[2] s^2 + c[3] s^3 in Horner order.
inline double cubic_at(double s, const double* c) {
  return ((c[3] * s + c[2]) * s + c[1]) * s + c[0];
}

// Hermite cubic on [x0, x0 + h] in power form y0 + t (a1 + t (a2 + t a3)).
inline double hermite_at(double s, double x0, double h, double y0, double a1,
                         double a2, double a3) {
  const double t = (s - x0) / h;
  return y0 + t * (a1 + t * (a2 + t * a3));
}

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace rsg::detail
