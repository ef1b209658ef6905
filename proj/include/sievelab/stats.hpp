#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sievelab {

double normal_cdf(double x);
double normal_pdf(double x);

// Inverse of normal_cdf, Newton-refined to ~1e-14; p in (0,1).
double normal_quantile(double p);

// One-sample Kolmogorov-Smirnov distance sup |F_emp - cdf| (sample copied
// and sorted internally).
double ks_statistic(std::span<const double> sample,
                    const std::function<double(double)>& cdf);

double ks_statistic_normal(std::span<const double> sample);

double mean(std::span<const double> v);
double variance(std::span<const double> v);  // unbiased
double median(std::vector<double> v);        // by value: scratch sort

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

}  // namespace sievelab
