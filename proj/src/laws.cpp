#include "sievelab/laws.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "sievelab/numeric.hpp"

namespace sievelab {
namespace {

// Keep W strictly inside (0,1) so |log W| and |log(1-W)| stay finite.
constexpr double kWCeil = 0.99999999999999989;  // largest double below 1

double clamp_open01(double w) {
  if (w < 0x1p-1000) return 0x1p-1000;
  if (w > kWCeil) return kWCeil;
  return w;
}

std::vector<double> split_params(std::string_view s) {
  std::vector<double> out;
  while (!s.empty()) {
    std::size_t comma = s.find(',');
    std::string tok(s.substr(0, comma));
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad numeric parameter '" + tok + "' in law spec");
    }
    if (used != tok.size())
      throw std::invalid_argument("bad numeric parameter '" + tok + "' in law spec");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool WLaw::lil_eligible() const {
  switch (kind) {
    case WKind::uniform:
    case WKind::beta:
      return true;
    case WKind::two_point:
      return q > 0.0 && q < 1.0 && w1 != w2;
    case WKind::deterministic:
      return false;
  }
  return false;
}

std::string WLaw::id() const {
  switch (kind) {
    case WKind::uniform:
      return "uniform";
    case WKind::beta:
      return "beta:" + fmt(alpha) + "," + fmt(beta);
    case WKind::two_point:
      return "twopoint:" + fmt(w1) + "," + fmt(w2) + "," + fmt(q);
    case WKind::deterministic:
      return "det:" + fmt(w);
  }
  return {};
}

WLaw WLaw::parse(std::string_view spec) {
  std::size_t colon = spec.find(':');
  std::string_view name = spec.substr(0, colon);
  std::vector<double> p;
  if (colon != std::string_view::npos) p = split_params(spec.substr(colon + 1));

  WLaw law;
  if (name == "uniform") {
    if (!p.empty()) throw std::invalid_argument("uniform takes no parameters");
    law.kind = WKind::uniform;
  } else if (name == "beta") {
    if (p.size() != 2 || p[0] <= 0.0 || p[1] <= 0.0)
      throw std::invalid_argument("beta law needs beta:alpha,beta with alpha,beta > 0");
    law.kind = WKind::beta;
    law.alpha = p[0];
    law.beta = p[1];
  } else if (name == "twopoint") {
    if (p.size() != 3 || p[0] <= 0.0 || p[0] >= 1.0 || p[1] <= 0.0 || p[1] >= 1.0 ||
        p[2] < 0.0 || p[2] > 1.0)
      throw std::invalid_argument(
          "twopoint law needs twopoint:w1,w2,q with w1,w2 in (0,1), q in [0,1]");
    law.kind = WKind::two_point;
    law.w1 = p[0];
    law.w2 = p[1];
    law.q = p[2];
  } else if (name == "det") {
    if (p.size() != 1 || p[0] <= 0.0 || p[0] >= 1.0)
      throw std::invalid_argument("det law needs det:w with w in (0,1)");
    law.kind = WKind::deterministic;
    law.w = p[0];
  } else {
    throw std::invalid_argument("unknown W-law '" + std::string(spec) +
                                "' (expected uniform | beta:a,b | twopoint:w1,w2,q | det:w)");
  }
  return law;
}

namespace laws_detail {

// Marsaglia-Tsang; the shape<1 boost consumes one extra uniform.
double gamma_draw(double shape, RandomStream& stream) {
  if (shape < 1.0) {
    double u = stream.next_uniform01();
    return gamma_draw(shape + 1.0, stream) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    // Box-Muller normal; stateless so stream consumption is reproducible.
    double u1 = stream.next_uniform01();
    double u2 = stream.next_uniform01();
    double x = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = stream.next_uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace laws_detail

double sample_w(const WLaw& law, RandomStream& stream) {
  switch (law.kind) {
    case WKind::uniform:
      return stream.next_uniform01();
    case WKind::beta: {
      if (law.beta == 1.0)
        return clamp_open01(std::pow(stream.next_uniform01(), 1.0 / law.alpha));
      if (law.alpha == 1.0)
        return clamp_open01(1.0 - std::pow(stream.next_uniform01(), 1.0 / law.beta));
      double x = laws_detail::gamma_draw(law.alpha, stream);
      double y = laws_detail::gamma_draw(law.beta, stream);
      return clamp_open01(x / (x + y));
    }
    case WKind::two_point:
      return stream.next_uniform01() < law.q ? law.w1 : law.w2;
    case WKind::deterministic:
      return law.w;
  }
  throw std::logic_error("unreachable");
}

namespace {

using laws_detail::eta_tail_cut;

// Composite integration over dyadic panels [0,1],[1,2],[2,4],...: keeps the
// adaptive rule from declaring victory on an initial grid that straddles a
// decaying integrand.
double integrate_panels(const std::function<double(double)>& f, double hi,
                        double tol, const char* what) {
  double total = 0.0;
  double lo = 0.0, edge = 1.0;
  while (lo < hi) {
    double up = std::min(edge, hi);
    total += adaptive_simpson(f, lo, up, tol, what);
    lo = up;
    edge *= 2.0;
  }
  return total;
}

// E|log(1-W)|^a via the survival function, substituted u = y^a so the
// integrand stays bounded at 0 for a < 1.
double eta_moment_by_quadrature(const WLaw& law, double a) {
  double cut = eta_tail_cut(law);
  double hi = std::pow(cut, a);
  auto integrand = [&](double u) {
    double y = std::pow(u, 1.0 / a);
    return 1.0 - eta_cdf(law, y);
  };
  return integrate_panels(integrand, hi, 1e-10 * std::max(1.0, hi),
                          "E|log(1-W)|^a");
}

}  // namespace

MomentProfile moment_profile(const WLaw& law, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("moment order a must be > 0");
  MomentProfile p{};
  p.a_order = a;
  switch (law.kind) {
    case WKind::uniform:
      // |log W| and |log(1-W)| are both standard exponential.
      p.mu = 1.0;
      p.sigma2 = 1.0;
      p.m_eta = 1.0;
      p.eta_moment_a = std::tgamma(1.0 + a);
      break;
    case WKind::beta: {
      p.mu = digamma(law.alpha + law.beta) - digamma(law.alpha);
      p.sigma2 = trigamma(law.alpha) - trigamma(law.alpha + law.beta);
      p.m_eta = digamma(law.alpha + law.beta) - digamma(law.beta);
      p.eta_moment_a = (a == 1.0) ? p.m_eta : eta_moment_by_quadrature(law, a);
      break;
    }
    case WKind::two_point: {
      double x1 = -std::log(law.w1), x2 = -std::log(law.w2);
      double e1 = -std::log1p(-law.w1), e2 = -std::log1p(-law.w2);
      p.mu = law.q * x1 + (1.0 - law.q) * x2;
      double second = law.q * x1 * x1 + (1.0 - law.q) * x2 * x2;
      p.sigma2 = std::max(0.0, second - p.mu * p.mu);
      p.m_eta = law.q * e1 + (1.0 - law.q) * e2;
      p.eta_moment_a = law.q * std::pow(e1, a) + (1.0 - law.q) * std::pow(e2, a);
      break;
    }
    case WKind::deterministic: {
      p.mu = -std::log(law.w);
      p.sigma2 = 0.0;
      p.m_eta = -std::log1p(-law.w);
      p.eta_moment_a = std::pow(p.m_eta, a);
      break;
    }
  }
  if (!(p.mu > 0.0) || !std::isfinite(p.mu) || !(p.m_eta > 0.0) ||
      !std::isfinite(p.m_eta))
    throw std::runtime_error("law yields a degenerate moment profile: " + law.id());
  return p;
}

double eta_cdf(const WLaw& law, double y) {
  if (y < 0.0) throw std::domain_error("eta_cdf requires y >= 0");
  double x = -std::expm1(-y);  // 1 - e^{-y}
  switch (law.kind) {
    case WKind::uniform:
      return x;
    case WKind::beta:
      return incomplete_beta_reg(law.alpha, law.beta, x);
    case WKind::two_point:
      return (law.w1 <= x ? law.q : 0.0) + (law.w2 <= x ? 1.0 - law.q : 0.0);
    case WKind::deterministic:
      return law.w <= x ? 1.0 : 0.0;
  }
  throw std::logic_error("unreachable");
}

namespace laws_detail {

double eta_tail_cut(const WLaw& law) {
  switch (law.kind) {
    case WKind::uniform:
      return -std::log(1e-12);
    case WKind::deterministic:
      return -std::log1p(-law.w);
    case WKind::two_point:
      return std::max(-std::log1p(-law.w1), -std::log1p(-law.w2));
    case WKind::beta:
      break;
  }
  double lo = 1.0, hi = 2.0;
  while (1.0 - eta_cdf(law, hi) > 1e-12) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6)
      throw std::runtime_error("eta tail cutoff not found for " + law.id());
  }
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    (1.0 - eta_cdf(law, mid) > 1e-12 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace laws_detail

double centering(const WLaw& law, double n) {
  if (n < 0.0) throw std::domain_error("centering requires n >= 0");
  if (n == 0.0) return 0.0;
  switch (law.kind) {
    case WKind::uniform:
      return n - 1.0 + std::exp(-n);
    case WKind::deterministic: {
      double eta0 = -std::log1p(-law.w);
      return std::max(0.0, n - eta0) / -std::log(law.w);
    }
    case WKind::two_point: {
      double e1 = -std::log1p(-law.w1), e2 = -std::log1p(-law.w2);
      double integral = law.q * std::max(0.0, n - e1) +
                        (1.0 - law.q) * std::max(0.0, n - e2);
      return integral / moment_profile(law).mu;
    }
    case WKind::beta:
      return laws_detail::centering_by_quadrature(law, n);
  }
  throw std::logic_error("unreachable");
}

namespace laws_detail {

double centering_by_quadrature(const WLaw& law, double n) {
  if (n <= 0.0) return 0.0;
  double cut = eta_tail_cut(law);
  double hi = std::min(n, cut);
  auto F = [&](double y) { return eta_cdf(law, y); };
  double integral = adaptive_simpson(F, 0.0, hi, 1e-8 * std::max(1.0, n),
                                     "centering integral of F_eta");
  if (n > cut) integral += n - cut;  // F is 1 up to 1e-12 past the cutoff
  return integral / moment_profile(law).mu;
}

MomentProfile moment_profile_by_quadrature(const WLaw& law, double a) {
  // Moments of xi = |log W| in t-space: density f_W(e^-t) e^-t.
  auto xi_density = [&](double t) -> double {
    double wv = std::exp(-t);
    switch (law.kind) {
      case WKind::uniform:
        return wv;
      case WKind::beta: {
        double ln_b = std::lgamma(law.alpha) + std::lgamma(law.beta) -
                      std::lgamma(law.alpha + law.beta);
        if (wv >= 1.0) return 0.0;
        return std::exp(-law.alpha * t + (law.beta - 1.0) * std::log1p(-wv) - ln_b);
      }
      default:
        throw std::invalid_argument(
            "quadrature moment profile needs a continuous law");
    }
  };
  double hi = 80.0 / (law.kind == WKind::beta ? std::min(1.0, law.alpha) : 1.0);
  auto moment = [&](double power, const char* what) {
    auto f = [&](double t) { return std::pow(t, power) * xi_density(t); };
    return integrate_panels(f, hi, 1e-11 * hi, what);
  };
  MomentProfile p{};
  p.a_order = a;
  p.mu = moment(1.0, "E|log W| (quadrature)");
  double second = moment(2.0, "E|log W|^2 (quadrature)");
  p.sigma2 = std::max(0.0, second - p.mu * p.mu);
  // eta moments through the mirrored law W' = 1-W.
  WLaw mirror = law;
  if (law.kind == WKind::beta) std::swap(mirror.alpha, mirror.beta);
  auto eta_density = [&](double t) -> double {
    double wv = std::exp(-t);
    switch (mirror.kind) {
      case WKind::uniform:
        return wv;
      case WKind::beta: {
        double ln_b = std::lgamma(mirror.alpha) + std::lgamma(mirror.beta) -
                      std::lgamma(mirror.alpha + mirror.beta);
        if (wv >= 1.0) return 0.0;
        return std::exp(-mirror.alpha * t + (mirror.beta - 1.0) * std::log1p(-wv) - ln_b);
      }
      default:
        return 0.0;
    }
  };
  double eta_hi = 80.0 / (mirror.kind == WKind::beta ? std::min(1.0, mirror.alpha) : 1.0);
  auto eta_moment = [&](double power, const char* what) {
    auto f = [&](double t) { return std::pow(t, power) * eta_density(t); };
    return integrate_panels(f, eta_hi, 1e-11 * eta_hi, what);
  };
  p.m_eta = eta_moment(1.0, "E|log(1-W)| (quadrature)");
  p.eta_moment_a = (a == 1.0) ? p.m_eta : eta_moment(a, "E|log(1-W)|^a (quadrature)");
  return p;
}

}  // namespace laws_detail

double clt_scale(const MomentProfile& profile, double n) {
  if (!(n > 0.0)) throw std::domain_error("clt scale requires n > 0");
  if (!(profile.sigma2 > 0.0))
    throw std::invalid_argument("LIL-ineligible law (sigma2 = 0)");
  double mu3 = profile.mu * profile.mu * profile.mu;
  return std::sqrt(profile.sigma2 / mu3 * n);
}

Scales scales(const MomentProfile& profile, double n) {
  if (!(n >= 3.0)) throw std::domain_error("scales require n >= 3");
  if (!(profile.sigma2 > 0.0))
    throw std::invalid_argument("LIL-ineligible law (sigma2 = 0)");
  double mu3 = profile.mu * profile.mu * profile.mu;
  double rate = profile.sigma2 / mu3;
  return {std::sqrt(rate * n), std::sqrt(2.0 * rate * n * std::log(std::log(n)))};
}

}  // namespace sievelab
