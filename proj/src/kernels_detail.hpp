#pragma once

// Shared per-element math for every kernel variant. This header must stay
// freestanding-compatible (no libc headers beyond <cstdint>/<cstddef>): the
// NEON translation unit is syntax-checked against a bare aarch64 target.
//
// Bit-identity contract: every variant evaluates the same operations per
// element (fma polynomial, correctly rounded div/mul/add), so results match
// the scalar reference bit for bit, including at the special-value edges.

#include <cstddef>
#include <cstdint>

namespace sievelab::kernels::detail {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;   // 0x3FE62E42FEE00000
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;   // 0x3DEA39EF35793C76
inline constexpr double kInvLn2 = 1.44269504088896338700e+00;  // 1/ln 2
inline constexpr double kSqrt2 = 1.41421356237309514547e+00;
inline constexpr double kExpNegCutoff = 707.0;  // keeps 2^n scaling in the normal range

// atanh(s)/s = sum w^k/(2k+1), w = s^2, |s| <= (sqrt2-1)/(sqrt2+1)
inline constexpr double kAtanhCoef[10] = {
    1.0,
    1.0 / 3.0,
    1.0 / 5.0,
    1.0 / 7.0,
    1.0 / 9.0,
    1.0 / 11.0,
    1.0 / 13.0,
    1.0 / 15.0,
    1.0 / 17.0,
    1.0 / 19.0,
};

// exp(r) Taylor coefficients 1/k!, |r| <= ln2/2
inline constexpr double kExpCoef[14] = {
    1.0,
    1.0,
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
    1.0 / 362880.0,
    1.0 / 3628800.0,
    1.0 / 39916800.0,
    1.0 / 479001600.0,
    1.0 / 6227020800.0,
};

inline double bits_to_double(std::uint64_t b) { return __builtin_bit_cast(double, b); }
inline std::uint64_t double_to_bits(double d) { return __builtin_bit_cast(std::uint64_t, d); }

inline double quiet_nan() { return bits_to_double(0x7FF8000000000000ull); }
inline double pos_inf() { return bits_to_double(0x7FF0000000000000ull); }

// -log(x) for one element. Normal positive inputs take the fast path; zero,
// negatives, subnormals, infinities and NaN are resolved here so the SIMD
// variants can route whole blocks containing them through this function.
inline double neg_log_one(double x) {
  std::uint64_t bits = double_to_bits(x);
  if ((bits & 0x7FFFFFFFFFFFFFFFull) == 0) return pos_inf();  // +-0
  if (bits >> 63) return quiet_nan();                         // negative
  std::uint64_t efield = (bits >> 52) & 0x7FF;
  if (efield == 0x7FF) return (bits << 12) ? quiet_nan() : -pos_inf();
  std::int64_t e = 0;
  if (efield == 0) {  // subnormal: renormalize
    bits = double_to_bits(x * 0x1p54);
    efield = (bits >> 52) & 0x7FF;
    e = -54;
  }
  e += static_cast<std::int64_t>(efield) - 1023;
  double f = bits_to_double((bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
  double adj = (f > kSqrt2) ? 1.0 : 0.0;
  f = (f > kSqrt2) ? 0.5 * f : f;
  double ed = static_cast<double>(e) + adj;
  double s = (f - 1.0) / (f + 1.0);  // f-1 is exact (Sterbenz)
  double w = s * s;
  double t = kAtanhCoef[9];
  for (int k = 8; k >= 0; --k) t = __builtin_fma(t, w, kAtanhCoef[k]);
  double r = (2.0 * s) * t;
  return -__builtin_fma(ed, kLn2Hi, __builtin_fma(ed, kLn2Lo, r));
}

// exp(-x) for one element; see kernels.hpp for the cutoff contract.
inline double exp_neg_one(double x) {
  if (x != x) return quiet_nan();
  if (x > kExpNegCutoff) return 0.0;
  if (x < -kExpNegCutoff) return pos_inf();
  double t = -x;
  double nd = __builtin_nearbyint(t * kInvLn2);
  double r = __builtin_fma(nd, -kLn2Hi, t);
  r = __builtin_fma(nd, -kLn2Lo, r);
  double p = kExpCoef[13];
  for (int k = 12; k >= 0; --k) p = __builtin_fma(p, r, kExpCoef[k]);
  auto n = static_cast<std::int64_t>(nd);  // |n| <= 1021, scaling stays normal
  return bits_to_double(double_to_bits(p) + (static_cast<std::uint64_t>(n) << 52));
}

// Reference striped reductions; the SIMD variants must reproduce these
// exactly (lane L accumulates indices == L mod 4, combined (a0+a1)+(a2+a3)).

inline double sum_striped(const double* in, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i & 3] += in[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

inline void theta_delta_term(double neg_log_p, double balls, double cut,
                             double& theta_term, double& delta_term) {
  double p = exp_neg_one(neg_log_p);
  double np = balls * p;
  if (neg_log_p <= cut) {
    theta_term = exp_neg_one(np);
    delta_term = 0.0;
  } else {
    theta_term = 0.0;
    delta_term = np;
  }
}

inline double abs_val(double x) { return __builtin_fabs(x); }

inline double max_val(double a, double b) { return a > b ? a : b; }

}  // namespace sievelab::kernels::detail
