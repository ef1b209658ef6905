#include "sievelab/numeric.hpp"

#include <cmath>
#include <limits>

namespace sievelab {
namespace {

double simpson_rule(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a,
                     double b, double fa, double fm, double fb, double whole,
                     double tol, int depth, const char* what) {
  if (depth > 60)
    throw QuadratureError(std::string("quadrature failed to converge for ") + what);
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = simpson_rule(fa, flm, fm, m - a);
  double right = simpson_rule(fm, frm, fb, b - m);
  double err = left + right - whole;
  if (std::fabs(err) <= 15.0 * tol) return left + right + err / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, what) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, what);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, const char* what) {
  if (!(b > a)) return 0.0;
  double fa = f(a);
  double fm = f(0.5 * (a + b));
  double fb = f(b);
  double whole = simpson_rule(fa, fm, fb, b - a);
  return adaptive_step(f, a, b, fa, fm, fb, whole, abs_tol, 0, what);
}

// Asymptotic expansion above 10, recurrence below.
double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma requires x > 0");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  // ln x - 1/(2x) - sum B_2n/(2n x^2n)
  double series = inv2 * (1.0 / 12.0 +
                  inv2 * (-1.0 / 120.0 +
                  inv2 * (1.0 / 252.0 +
                  inv2 * (-1.0 / 240.0 +
                  inv2 * (1.0 / 132.0 +
                  inv2 * (-691.0 / 32760.0))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("trigamma requires x > 0");
  double acc = 0.0;
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  double series = 1.0 +
                  inv * (0.5 +
                  inv * (1.0 / 6.0 +
                  inv2 * (-1.0 / 30.0 +
                  inv2 * (1.0 / 42.0 +
                  inv2 * (-1.0 / 30.0 +
                  inv2 * (5.0 / 66.0))))));
  return acc + inv * series;
}

namespace {

// Lentz's continued fraction for the incomplete beta.
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw QuadratureError("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta_reg(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("incomplete_beta_reg requires a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = a * std::log(x) + b * std::log1p(-x) -
                    (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace sievelab
