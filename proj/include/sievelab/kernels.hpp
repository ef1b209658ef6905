#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace sievelab::kernels {

struct ThetaDeltaSums {
  double theta;  // sum of exp(-n*p_k) over boxes with n*p_k >= 1
  double delta;  // sum of n*p_k over boxes with n*p_k < 1
};

// A table of data-parallel primitives. Variants (scalar / AVX2 / NEON) are
// selected at runtime and are bit-identical per element: the same fma-based
// polynomials evaluated lane-wise, and reductions striped over four
// accumulators (index mod 4) combined as (a0+a1)+(a2+a3) in every variant.
struct KernelTable {
  const char* name;

  // out[i] = -log(in[i]); inputs <= 0 map to +inf (0) / NaN (negative).
  void (*neg_log)(const double* in, double* out, std::size_t n);

  // out[i] = exp(-in[i]); arguments above 707 flush to exactly 0 and below
  // -707 to +inf, so no subnormal results are produced.
  void (*exp_neg)(const double* in, double* out, std::size_t n);

  // Striped deterministic sum.
  double (*sum)(const double* in, std::size_t n);

  // One fused pass over log-frequencies: in[i] = -log p_i (positive).
  // Element i is a "large box" when in[i] <= cut (cut ~ log n, snapped up a
  // few ulps so exact dyadic ties land on the >= side).
  ThetaDeltaSums (*theta_delta)(const double* neg_log_p, std::size_t n,
                                double balls, double cut);

  // max over i in [0,n) of max(|k0+i+1 - inv_m*pos[i]|, |k0+i - inv_m*pos[i]|)
  // -- the block contribution to sup_{y} |nu(y) - inv_m*y| evaluated at the
  // jump points of nu. Endpoint terms are the caller's business.
  double (*sup_abs_dev_block)(const double* pos, std::size_t n, double inv_m,
                              double k0);
};

const KernelTable& scalar();

// Best variant supported by this CPU, overridable via SIEVE_LAB_SIMD
// (one of: scalar, avx2, neon). Resolved once.
const KernelTable& active();

// nullptr when the name is unknown or the variant is not usable here.
const KernelTable* by_name(std::string_view name);

// Every variant usable on this machine (scalar first).
std::vector<const KernelTable*> available();

}  // namespace sievelab::kernels
