#include <cmath>

#include "rsg/detail/formulas.hpp"
#include "rsg/kernels.hpp"

namespace rsg::kernels {
namespace {

void affine(const double* s, double* out, std::size_t n, double start,
            double v0, double slope) {
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::affine_at(s[i], start, v0, slope);
}

void cubic(const double* s, double* out, std::size_t n, const double* c) {
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::cubic_at(s[i], c);
}

void hermite(const double* s, const std::int32_t* idx, double* out,
             std::size_t n, const double* x0, const double* h, const double* y0,
             const double* a1, const double* a2, const double* a3) {
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = idx[i];
    out[i] = detail::hermite_at(s[i], x0[k], h[k], y0[k], a1[k], a2[k], a3[k]);
  }
}

void axpy(double w, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + w * x[i];
}

void scale(double w, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = w * x[i];
}

void vmin(const double* a, double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) b[i] = a[i] < b[i] ? a[i] : b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

ArgMin argmin(const double* x, std::size_t n) {
  ArgMin r{x[0], 0};
  for (std::size_t i = 1; i < n; ++i) {
    if (x[i] < r.value) r = {x[i], i};
  }
  return r;
}

void bisect_mid(const double* lo, const double* hi, double* mid, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) mid[i] = lo[i] + (hi[i] - lo[i]) * 0.5;
}

void bisect_update(double* lo, double* hi, const double* mid, const double* fmid,
                   const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (fmid[i] < y[i]) {
      lo[i] = mid[i];
    } else {
      hi[i] = mid[i];
    }
  }
}

inline void loop_field(const LoopRhs& r, double x, double z, double& dx, double& dz) {
  dx = z - detail::cubic_at(x, r.drift);
  const double a = std::fabs(z);
  std::size_t k = 0;
  for (std::size_t j = 1; j < r.q_pieces; ++j) k += (a >= r.q_start[j]) ? 1 : 0;
  const double q = detail::affine_at(a, r.q_start[k], r.q_value[k], r.q_slope[k]);
  dz = x - detail::sign_of(z) * q;
}

void loop_rk4(const LoopRhs& r, double* xs, double* zs, std::uint8_t* alive,
              std::size_t n, double h, std::size_t steps) {
  const double hh = h * 0.5;
  const double h6 = h / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = xs[i];
    double z = zs[i];
    for (std::size_t k = 0; k < steps && alive[i]; ++k) {
      double k1x, k1z, k2x, k2z, k3x, k3z, k4x, k4z;
      loop_field(r, x, z, k1x, k1z);
      loop_field(r, x + hh * k1x, z + hh * k1z, k2x, k2z);
      loop_field(r, x + hh * k2x, z + hh * k2z, k3x, k3z);
      loop_field(r, x + h * k3x, z + h * k3z, k4x, k4z);
      x = x + h6 * (((k1x + 2.0 * k2x) + 2.0 * k3x) + k4x);
      z = z + h6 * (((k1z + 2.0 * k2z) + 2.0 * k3z) + k4z);
      if (!(x * x + z * z <= 1e12)) alive[i] = 0;
    }
    xs[i] = x;
    zs[i] = z;
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table t{"scalar", affine, cubic,      hermite,       axpy,
                       scale,    vmin,   sub,        argmin,        bisect_mid,
                       bisect_update,    loop_rk4};
  return t;
}

}  // namespace rsg::kernels
