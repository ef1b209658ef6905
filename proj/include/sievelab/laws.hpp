#pragma once

#include <string>
#include <string_view>

#include "sievelab/rng.hpp"

namespace sievelab {

enum class WKind { uniform, beta, two_point, deterministic };

// A distribution for the stick-breaking factor W on the open interval (0,1).
// Deterministic laws (and two-point laws with a degenerate mixture) have
// Var|log W| = 0; they stay registered for exact unit tests but are flagged
// ineligible for LIL experiments.
struct WLaw {
  WKind kind = WKind::uniform;
  double alpha = 0.0, beta = 0.0;      // beta parameters
  double w1 = 0.0, w2 = 0.0, q = 0.0;  // two-point atoms and mixture weight
  double w = 0.0;                      // deterministic atom

  bool lil_eligible() const;
  std::string id() const;

  // Grammar: uniform | beta:a,b | twopoint:w1,w2,q | det:w
  static WLaw parse(std::string_view spec);

  bool operator==(const WLaw&) const = default;
};

struct MomentProfile {
  double mu;            // E|log W|
  double sigma2;        // Var|log W|
  double m_eta;         // E|log(1-W)|
  double eta_moment_a;  // E|log(1-W)|^a
  double a_order;
};

double sample_w(const WLaw& law, RandomStream& stream);

MomentProfile moment_profile(const WLaw& law, double a = 1.0);

// P{|log(1-W)| <= y} = F_W(1 - e^{-y})
double eta_cdf(const WLaw& law, double y);

// mu^{-1} * integral_0^n P{|log(1-W)| <= y} dy; closed form where one
// exists, otherwise adaptive Simpson to abs tolerance 1e-8 * max(1, n).
double centering(const WLaw& law, double n);

struct Scales {
  double clt;  // sqrt(sigma2 mu^-3 n)
  double lil;  // sqrt(2 sigma2 mu^-3 n log log n)
};

// Requires n >= 3 (log log n > 0) and sigma2 > 0.
Scales scales(const MomentProfile& profile, double n);

// CLT scale alone is defined for any n > 0.
double clt_scale(const MomentProfile& profile, double n);

namespace laws_detail {

// Independent quadrature routes; production closed forms are cross-checked
// against these (1e-6 agreement) in the test suite.
MomentProfile moment_profile_by_quadrature(const WLaw& law, double a = 1.0);
double centering_by_quadrature(const WLaw& law, double n);

// Smallest y with 1 - F_eta(y) <= 1e-12 (tail cutoff for integrals).
double eta_tail_cut(const WLaw& law);

double gamma_draw(double shape, RandomStream& stream);

}  // namespace laws_detail

}  // namespace sievelab
