#include "sievelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sievelab/kernels.hpp"

namespace sievelab {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.3989422804014326779;
}

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("normal_quantile requires p in (0,1)");
  if (p == 0.5) return 0.0;
  // Tail-accurate starting point, then Newton on the cdf.
  bool upper = p > 0.5;
  double q = upper ? 1.0 - p : p;
  double t = std::sqrt(-2.0 * std::log(q));
  double z = -(t - (2.515517 + t * (0.802853 + t * 0.010328)) /
                       (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308))));
  for (int it = 0; it < 6; ++it) {
    double err = normal_cdf(z) - q;
    double step = err / normal_pdf(z);
    z -= step;
    if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(z))) break;
  }
  return upper ? -z : z;
}

double ks_statistic(std::span<const double> sample,
                    const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // deviation at the atom and at its left limit; the latter keeps step
    // references (an ECDF against itself) exact
    double at = cdf(sorted[i]);
    double before = cdf(std::nextafter(sorted[i], -std::numeric_limits<double>::infinity()));
    d = std::max(d, std::fabs((static_cast<double>(i) + 1.0) / m - at));
    d = std::max(d, std::fabs(before - static_cast<double>(i) / m));
  }
  return d;
}

double ks_statistic_normal(std::span<const double> sample) {
  return ks_statistic(sample, [](double x) { return normal_cdf(x); });
}

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean: empty input");
  return kernels::active().sum(v.data(), v.size()) / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("variance: need >= 2 values");
  double m = mean(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
  return kernels::active().sum(sq.data(), sq.size()) /
         (static_cast<double>(v.size()) - 1.0);
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty input");
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("ls_slope: need matched inputs, >= 2 points");
  double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("ls_slope: degenerate x");
  return sxy / sxx;
}

}  // namespace sievelab
