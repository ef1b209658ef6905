#include "kernels_detail.hpp"
#include "sievelab/kernels.hpp"

namespace sievelab::kernels {
namespace {

using namespace detail;

void neg_log_scalar(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = neg_log_one(in[i]);
}

void exp_neg_scalar(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = exp_neg_one(in[i]);
}

double sum_scalar(const double* in, std::size_t n) { return sum_striped(in, n); }

ThetaDeltaSums theta_delta_scalar(const double* neg_log_p, std::size_t n,
                                  double balls, double cut) {
  double th[4] = {0.0, 0.0, 0.0, 0.0};
  double de[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    double tt, dt;
    theta_delta_term(neg_log_p[i], balls, cut, tt, dt);
    th[i & 3] += tt;
    de[i & 3] += dt;
  }
  return {(th[0] + th[1]) + (th[2] + th[3]), (de[0] + de[1]) + (de[2] + de[3])};
}

double sup_abs_dev_scalar(const double* pos, std::size_t n, double inv_m,
                          double k0) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = pos[i] * inv_m;
    double k = k0 + static_cast<double>(i);
    best = max_val(best, abs_val((k + 1.0) - d));
    best = max_val(best, abs_val(k - d));
  }
  return best;
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table = {
      "scalar",          neg_log_scalar,     exp_neg_scalar,
      sum_scalar,        theta_delta_scalar, sup_abs_dev_scalar,
  };
  return table;
}

}  // namespace sievelab::kernels
