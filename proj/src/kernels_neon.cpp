// NEON (aarch64) variant; mirrors the scalar reference ops lane for lane.
// Reductions keep the four-stripe layout with two float64x2 accumulators.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "kernels_detail.hpp"
#include "sievelab/kernels.hpp"

namespace sievelab::kernels {
namespace {

using namespace detail;

constexpr double kMinNormal = 2.2250738585072014e-308;

// fma(a, b, c) = a*b + c
inline float64x2_t fma_pd(float64x2_t a, float64x2_t b, float64x2_t c) {
  return vfmaq_f64(c, a, b);
}

inline float64x2_t exp_neg_pd(float64x2_t x) {
  const float64x2_t cutoff = vdupq_n_f64(kExpNegCutoff);
  uint64x2_t ordered = vceqq_f64(x, x);
  uint64x2_t zero_mask = vcgtq_f64(x, cutoff);
  uint64x2_t inf_mask = vcltq_f64(x, vdupq_n_f64(-kExpNegCutoff));

  float64x2_t t = vnegq_f64(x);
  t = vminq_f64(vmaxq_f64(t, vdupq_n_f64(-kExpNegCutoff)), cutoff);
  float64x2_t nd = vrndnq_f64(vmulq_f64(t, vdupq_n_f64(kInvLn2)));
  float64x2_t r = fma_pd(nd, vdupq_n_f64(-kLn2Hi), t);
  r = fma_pd(nd, vdupq_n_f64(-kLn2Lo), r);
  float64x2_t p = vdupq_n_f64(kExpCoef[13]);
  for (int k = 12; k >= 0; --k) p = fma_pd(p, r, vdupq_n_f64(kExpCoef[k]));

  float64x2_t magic = vdupq_n_f64(6755399441055744.0);
  int64x2_t ni = vsubq_s64(vreinterpretq_s64_f64(vaddq_f64(nd, magic)),
                           vdupq_n_s64(0x4338000000000000ll));
  int64x2_t scaled = vaddq_s64(vreinterpretq_s64_f64(p), vshlq_n_s64(ni, 52));
  float64x2_t res = vreinterpretq_f64_s64(scaled);

  res = vbslq_f64(zero_mask, vdupq_n_f64(0.0), res);
  res = vbslq_f64(inf_mask, vdupq_n_f64(pos_inf()), res);
  res = vbslq_f64(ordered, res, vdupq_n_f64(quiet_nan()));
  return res;
}

inline float64x2_t neg_log_normal_pd(float64x2_t x) {
  uint64x2_t bits = vreinterpretq_u64_f64(x);
  uint64x2_t efield = vshrq_n_u64(bits, 52);
  float64x2_t e = vsubq_f64(
      vreinterpretq_f64_u64(vorrq_u64(efield, vdupq_n_u64(0x4330000000000000ull))),
      vdupq_n_f64(4503599627370496.0 + 1023.0));
  float64x2_t f = vreinterpretq_f64_u64(
      vorrq_u64(vandq_u64(bits, vdupq_n_u64(0x000FFFFFFFFFFFFFull)),
                vdupq_n_u64(0x3FF0000000000000ull)));
  uint64x2_t up = vcgtq_f64(f, vdupq_n_f64(kSqrt2));
  f = vbslq_f64(up, vmulq_f64(f, vdupq_n_f64(0.5)), f);
  float64x2_t ed = vaddq_f64(
      e, vreinterpretq_f64_u64(vandq_u64(up, vreinterpretq_u64_f64(vdupq_n_f64(1.0)))));
  const float64x2_t one = vdupq_n_f64(1.0);
  float64x2_t s = vdivq_f64(vsubq_f64(f, one), vaddq_f64(f, one));
  float64x2_t w = vmulq_f64(s, s);
  float64x2_t t = vdupq_n_f64(kAtanhCoef[9]);
  for (int k = 8; k >= 0; --k) t = fma_pd(t, w, vdupq_n_f64(kAtanhCoef[k]));
  float64x2_t r = vmulq_f64(vmulq_f64(vdupq_n_f64(2.0), s), t);
  float64x2_t res = fma_pd(ed, vdupq_n_f64(kLn2Hi),
                           fma_pd(ed, vdupq_n_f64(kLn2Lo), r));
  return vnegq_f64(res);
}

void neg_log_neon(const double* in, double* out, std::size_t n) {
  std::size_t i = 0;
  const float64x2_t min_normal = vdupq_n_f64(kMinNormal);
  const float64x2_t inf = vdupq_n_f64(pos_inf());
  for (; i + 2 <= n; i += 2) {
    float64x2_t x = vld1q_f64(in + i);
    uint64x2_t special = vorrq_u64(
        vcltq_f64(x, min_normal),
        vreinterpretq_u64_u32(vmvnq_u32(vreinterpretq_u32_u64(vcltq_f64(x, inf)))));
    if (vgetq_lane_u64(special, 0) | vgetq_lane_u64(special, 1)) {
      out[i] = neg_log_one(in[i]);
      out[i + 1] = neg_log_one(in[i + 1]);
    } else {
      vst1q_f64(out + i, neg_log_normal_pd(x));
    }
  }
  for (; i < n; ++i) out[i] = neg_log_one(in[i]);
}

void exp_neg_neon(const double* in, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, exp_neg_pd(vld1q_f64(in + i)));
  for (; i < n; ++i) out[i] = exp_neg_one(in[i]);
}

double sum_neon(const double* in, std::size_t n) {
  float64x2_t a01 = vdupq_n_f64(0.0);
  float64x2_t a23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a01 = vaddq_f64(a01, vld1q_f64(in + i));
    a23 = vaddq_f64(a23, vld1q_f64(in + i + 2));
  }
  double lanes[4] = {vgetq_lane_f64(a01, 0), vgetq_lane_f64(a01, 1),
                     vgetq_lane_f64(a23, 0), vgetq_lane_f64(a23, 1)};
  for (; i < n; ++i) lanes[i & 3] += in[i];
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

ThetaDeltaSums theta_delta_neon(const double* neg_log_p, std::size_t n,
                                double balls, double cut) {
  float64x2_t th01 = vdupq_n_f64(0.0), th23 = vdupq_n_f64(0.0);
  float64x2_t de01 = vdupq_n_f64(0.0), de23 = vdupq_n_f64(0.0);
  const float64x2_t cut_v = vdupq_n_f64(cut);
  const float64x2_t balls_v = vdupq_n_f64(balls);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int half = 0; half < 2; ++half) {
      float64x2_t T = vld1q_f64(neg_log_p + i + 2 * half);
      uint64x2_t large = vcleq_f64(T, cut_v);
      float64x2_t np = vmulq_f64(balls_v, exp_neg_pd(T));
      float64x2_t tt = vreinterpretq_f64_u64(
          vandq_u64(large, vreinterpretq_u64_f64(exp_neg_pd(np))));
      float64x2_t dt = vreinterpretq_f64_u64(
          vbicq_u64(vreinterpretq_u64_f64(np), large));
      if (half == 0) {
        th01 = vaddq_f64(th01, tt);
        de01 = vaddq_f64(de01, dt);
      } else {
        th23 = vaddq_f64(th23, tt);
        de23 = vaddq_f64(de23, dt);
      }
    }
  }
  double th_l[4] = {vgetq_lane_f64(th01, 0), vgetq_lane_f64(th01, 1),
                    vgetq_lane_f64(th23, 0), vgetq_lane_f64(th23, 1)};
  double de_l[4] = {vgetq_lane_f64(de01, 0), vgetq_lane_f64(de01, 1),
                    vgetq_lane_f64(de23, 0), vgetq_lane_f64(de23, 1)};
  for (; i < n; ++i) {
    double tt, dt;
    theta_delta_term(neg_log_p[i], balls, cut, tt, dt);
    th_l[i & 3] += tt;
    de_l[i & 3] += dt;
  }
  return {(th_l[0] + th_l[1]) + (th_l[2] + th_l[3]),
          (de_l[0] + de_l[1]) + (de_l[2] + de_l[3])};
}

double sup_abs_dev_neon(const double* pos, std::size_t n, double inv_m,
                        double k0) {
  float64x2_t best = vdupq_n_f64(0.0);
  double idx0[2] = {k0, k0 + 1.0};
  float64x2_t idx = vld1q_f64(idx0);
  const float64x2_t inv = vdupq_n_f64(inv_m);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t two = vdupq_n_f64(2.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t d = vmulq_f64(vld1q_f64(pos + i), inv);
    float64x2_t a = vabsq_f64(vsubq_f64(vaddq_f64(idx, one), d));
    float64x2_t b = vabsq_f64(vsubq_f64(idx, d));
    best = vmaxq_f64(best, vmaxq_f64(a, b));
    idx = vaddq_f64(idx, two);
  }
  double out = max_val(vgetq_lane_f64(best, 0), vgetq_lane_f64(best, 1));
  for (; i < n; ++i) {
    double d = pos[i] * inv_m;
    double k = k0 + static_cast<double>(i);
    out = max_val(out, abs_val((k + 1.0) - d));
    out = max_val(out, abs_val(k - d));
  }
  return out;
}

}  // namespace

const KernelTable* neon_table() {
  static const KernelTable table = {
      "neon",    neg_log_neon,     exp_neg_neon,
      sum_neon,  theta_delta_neon, sup_abs_dev_neon,
  };
  return &table;
}

}  // namespace sievelab::kernels

#endif  // __aarch64__
