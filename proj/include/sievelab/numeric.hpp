#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace sievelab {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adaptive Simpson on [a, b] to absolute tolerance; throws QuadratureError
// naming `what` if the recursion depth limit is hit before convergence.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, const char* what);

double digamma(double x);
double trigamma(double x);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta_reg(double a, double b, double x);

}  // namespace sievelab
