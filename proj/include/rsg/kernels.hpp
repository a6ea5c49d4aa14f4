#pragma once

#include <cstddef>
#include <cstdint>

// Batched numeric kernels. Every entry has a scalar reference implementation
// and, on x86-64, an AVX2 variant selected at runtime. Both are compiled
// without FMA contraction and produce bit-identical results.
namespace rsg::kernels {

struct ArgMin {
  double value;
  std::size_t index;
};

// Right-hand side of the scalar loop family
//   xdot = z - P(x),  zdot = x - sign(z) Q(|z|)
// with P a cubic and Q piecewise affine (breakpoints q_start[0] = 0).
struct LoopRhs {
  double drift[4];
  const double* q_start;
  const double* q_value;
  const double* q_slope;
  std::size_t q_pieces;
};

struct Table {
  const char* name;
  void (*affine)(const double* s, double* out, std::size_t n, double start,
                 double v0, double slope);
  void (*cubic)(const double* s, double* out, std::size_t n, const double* c);
  // idx[i] selects the Hermite interval of s[i].
  void (*hermite)(const double* s, const std::int32_t* idx, double* out,
                  std::size_t n, const double* x0, const double* h,
                  const double* y0, const double* a1, const double* a2,
                  const double* a3);
  void (*axpy)(double w, const double* x, double* y, std::size_t n);
  void (*scale)(double w, const double* x, double* y, std::size_t n);
  void (*vmin)(const double* a, double* b, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  // First index of the smallest value; n must be positive.
  ArgMin (*argmin)(const double* x, std::size_t n);
  void (*bisect_mid)(const double* lo, const double* hi, double* mid,
                     std::size_t n);
  void (*bisect_update)(double* lo, double* hi, const double* mid,
                        const double* fmid, const double* y, std::size_t n);
  // Advances every alive member `steps` RK4 steps. A member whose squared
  // norm exceeds 1e12 (or turns NaN) is frozen and marked dead.
  void (*loop_rk4)(const LoopRhs& rhs, double* x, double* z,
                   std::uint8_t* alive, std::size_t n, double h,
                   std::size_t steps);
};

const Table& scalar_table();

// nullptr when the variant was not built or the CPU lacks AVX2.
const Table* avx2_table();

// Selected once per process. RSG_SIMD=scalar forces the reference path.
const Table& active();

}  // namespace rsg::kernels
