#include <cstdlib>
#include <stdexcept>
#include <string>

#include "sievelab/kernels.hpp"

namespace sievelab::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const KernelTable* avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable* neon_table();
#endif

namespace {

const KernelTable* simd_variant() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return avx2_table();
#elif defined(__aarch64__)
  return neon_table();
#endif
  return nullptr;
}

}  // namespace

const KernelTable* by_name(std::string_view name) {
  if (name == "scalar") return &scalar();
  const KernelTable* simd = simd_variant();
  if (simd && name == simd->name) return simd;
  return nullptr;
}

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out{&scalar()};
  if (const KernelTable* simd = simd_variant()) out.push_back(simd);
  return out;
}

const KernelTable& active() {
  static const KernelTable* chosen = [] {
    if (const char* env = std::getenv("SIEVE_LAB_SIMD")) {
      const KernelTable* t = by_name(env);
      if (!t)
        throw std::runtime_error(std::string("SIEVE_LAB_SIMD=") + env +
                                 " is not a usable kernel variant here");
      return t;
    }
    const KernelTable* simd = simd_variant();
    return simd ? simd : &scalar();
  }();
  return *chosen;
}

}  // namespace sievelab::kernels
