// AVX2/FMA variant. Compiled with -mavx2 -mfma and only dispatched to when
// cpuid reports both; per-element results are bit-identical to the scalar
// reference (same fma polynomial, same rounding steps, same stripes).

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "kernels_detail.hpp"
#include "sievelab/kernels.hpp"

namespace sievelab::kernels {
namespace {

using namespace detail;

constexpr double kMinNormal = 2.2250738585072014e-308;

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// exp(-x) on four lanes, branchless; mirrors detail::exp_neg_one.
inline __m256d exp_neg_pd(__m256d x) {
  const __m256d cutoff = _mm256_set1_pd(kExpNegCutoff);
  __m256d nan_mask = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  __m256d zero_mask = _mm256_cmp_pd(x, cutoff, _CMP_GT_OQ);
  __m256d inf_mask = _mm256_cmp_pd(x, _mm256_set1_pd(-kExpNegCutoff), _CMP_LT_OQ);

  __m256d t = _mm256_sub_pd(_mm256_setzero_pd(), x);
  t = _mm256_min_pd(_mm256_max_pd(t, _mm256_set1_pd(-kExpNegCutoff)), cutoff);
  __m256d nd = _mm256_round_pd(_mm256_mul_pd(t, _mm256_set1_pd(kInvLn2)),
                               _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fmadd_pd(nd, _mm256_set1_pd(-kLn2Hi), t);
  r = _mm256_fmadd_pd(nd, _mm256_set1_pd(-kLn2Lo), r);
  __m256d p = _mm256_set1_pd(kExpCoef[13]);
  for (int k = 12; k >= 0; --k)
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kExpCoef[k]));

  // 2^n scaling via exponent bits; n recovered with the 2^52+2^51 trick.
  __m256d magic = _mm256_set1_pd(6755399441055744.0);
  __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(nd, magic)),
                                _mm256_set1_epi64x(0x4338000000000000ll));
  __m256i scaled = _mm256_add_epi64(_mm256_castpd_si256(p), _mm256_slli_epi64(ni, 52));
  __m256d res = _mm256_castsi256_pd(scaled);

  res = _mm256_blendv_pd(res, _mm256_setzero_pd(), zero_mask);
  res = _mm256_blendv_pd(res, _mm256_set1_pd(pos_inf()), inf_mask);
  res = _mm256_blendv_pd(res, _mm256_set1_pd(quiet_nan()), nan_mask);
  return res;
}

// -log(x) on four lanes; callers must have excluded non-normal inputs.
inline __m256d neg_log_normal_pd(__m256d x) {
  __m256i bits = _mm256_castpd_si256(x);
  __m256i efield = _mm256_srli_epi64(bits, 52);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(efield, _mm256_set1_epi64x(0x4330000000000000ll))),
      _mm256_set1_pd(4503599627370496.0 + 1023.0));
  __m256d f = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                      _mm256_set1_epi64x(0x3FF0000000000000ll)));
  __m256d up = _mm256_cmp_pd(f, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  f = _mm256_blendv_pd(f, _mm256_mul_pd(f, _mm256_set1_pd(0.5)), up);
  __m256d ed = _mm256_add_pd(e, _mm256_and_pd(up, _mm256_set1_pd(1.0)));
  __m256d one = _mm256_set1_pd(1.0);
  __m256d s = _mm256_div_pd(_mm256_sub_pd(f, one), _mm256_add_pd(f, one));
  __m256d w = _mm256_mul_pd(s, s);
  __m256d t = _mm256_set1_pd(kAtanhCoef[9]);
  for (int k = 8; k >= 0; --k)
    t = _mm256_fmadd_pd(t, w, _mm256_set1_pd(kAtanhCoef[k]));
  __m256d r = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), s), t);
  __m256d res = _mm256_fmadd_pd(
      ed, _mm256_set1_pd(kLn2Hi),
      _mm256_fmadd_pd(ed, _mm256_set1_pd(kLn2Lo), r));
  return _mm256_xor_pd(res, _mm256_set1_pd(-0.0));
}

void neg_log_avx2(const double* in, double* out, std::size_t n) {
  std::size_t i = 0;
  const __m256d min_normal = _mm256_set1_pd(kMinNormal);
  const __m256d inf = _mm256_set1_pd(pos_inf());
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(in + i);
    __m256d special = _mm256_or_pd(_mm256_cmp_pd(x, min_normal, _CMP_LT_OQ),
                                   _mm256_cmp_pd(x, inf, _CMP_NLT_UQ));
    if (_mm256_movemask_pd(special)) {
      for (std::size_t k = i; k < i + 4; ++k) out[k] = neg_log_one(in[k]);
    } else {
      _mm256_storeu_pd(out + i, neg_log_normal_pd(x));
    }
  }
  for (; i < n; ++i) out[i] = neg_log_one(in[i]);
}

void exp_neg_avx2(const double* in, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, exp_neg_pd(_mm256_loadu_pd(in + i)));
  for (; i < n; ++i) out[i] = exp_neg_one(in[i]);
}

double sum_avx2(const double* in, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(in + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  for (; i < n; ++i) lanes[i & 3] += in[i];
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

ThetaDeltaSums theta_delta_avx2(const double* neg_log_p, std::size_t n,
                                double balls, double cut) {
  __m256d th = _mm256_setzero_pd();
  __m256d de = _mm256_setzero_pd();
  const __m256d cut_v = _mm256_set1_pd(cut);
  const __m256d balls_v = _mm256_set1_pd(balls);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d T = _mm256_loadu_pd(neg_log_p + i);
    __m256d large = _mm256_cmp_pd(T, cut_v, _CMP_LE_OQ);
    __m256d np = _mm256_mul_pd(balls_v, exp_neg_pd(T));
    th = _mm256_add_pd(th, _mm256_and_pd(large, exp_neg_pd(np)));
    de = _mm256_add_pd(de, _mm256_andnot_pd(large, np));
  }
  alignas(32) double th_l[4], de_l[4];
  _mm256_store_pd(th_l, th);
  _mm256_store_pd(de_l, de);
  for (; i < n; ++i) {
    double tt, dt;
    theta_delta_term(neg_log_p[i], balls, cut, tt, dt);
    th_l[i & 3] += tt;
    de_l[i & 3] += dt;
  }
  return {(th_l[0] + th_l[1]) + (th_l[2] + th_l[3]),
          (de_l[0] + de_l[1]) + (de_l[2] + de_l[3])};
}

double sup_abs_dev_avx2(const double* pos, std::size_t n, double inv_m,
                        double k0) {
  __m256d best = _mm256_setzero_pd();
  __m256d idx = _mm256_add_pd(_mm256_set1_pd(k0), _mm256_set_pd(3.0, 2.0, 1.0, 0.0));
  const __m256d inv = _mm256_set1_pd(inv_m);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d four = _mm256_set1_pd(4.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_mul_pd(_mm256_loadu_pd(pos + i), inv);
    __m256d a = abs_pd(_mm256_sub_pd(_mm256_add_pd(idx, one), d));
    __m256d b = abs_pd(_mm256_sub_pd(idx, d));
    best = _mm256_max_pd(best, _mm256_max_pd(a, b));
    idx = _mm256_add_pd(idx, four);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double out = max_val(max_val(lanes[0], lanes[1]), max_val(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    double d = pos[i] * inv_m;
    double k = k0 + static_cast<double>(i);
    out = max_val(out, abs_val((k + 1.0) - d));
    out = max_val(out, abs_val(k - d));
  }
  return out;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table = {
      "avx2",    neg_log_avx2,    exp_neg_avx2,
      sum_avx2,  theta_delta_avx2, sup_abs_dev_avx2,
  };
  return &table;
}

}  // namespace sievelab::kernels

#endif  // x86_64
