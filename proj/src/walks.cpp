#include "sievelab/walks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "sievelab/kernels.hpp"

namespace sievelab {
namespace {

constexpr std::int64_t kStepCap = 1'000'000'000;
constexpr std::size_t kMinBlock = 256;
constexpr std::size_t kMaxBlock = 1u << 16;
constexpr std::size_t kScanBlock = 1u << 16;

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double relax_up(double x) {
  for (int i = 0; i < 8; ++i)
    x = std::nextafter(x, std::numeric_limits<double>::infinity());
  return x;
}

WalkSource WalkSource::sieve(const WLaw& law) {
  WalkSource s;
  s.kind_ = Kind::sieve;
  s.law_ = law;
  MomentProfile p = moment_profile(law);
  s.xi_mean_ = p.mu;
  s.xi_var_ = p.sigma2;
  s.eta_mean_ = p.m_eta;
  return s;
}

WalkSource WalkSource::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exp source needs rate > 0");
  WalkSource s;
  s.kind_ = Kind::exponential;
  s.rate_ = rate;
  s.xi_mean_ = 1.0 / rate;
  s.xi_var_ = 1.0 / (rate * rate);
  s.eta_mean_ = 1.0 / rate;
  return s;
}

WalkSource WalkSource::fixed(double xi, double eta) {
  if (!(xi > 0.0)) throw std::invalid_argument("fixed source needs xi > 0");
  if (eta < 0.0) throw std::invalid_argument("fixed source needs eta >= 0");
  WalkSource s;
  s.kind_ = Kind::fixed;
  s.xi_const_ = xi;
  s.eta_const_ = eta;
  s.xi_mean_ = xi;
  s.xi_var_ = 0.0;
  s.eta_mean_ = eta;
  return s;
}

WalkSource WalkSource::parse(std::string_view spec) {
  std::size_t colon = spec.find(':');
  std::string_view name = spec.substr(0, colon);
  if (name == "exp") {
    double rate = 1.0;
    if (colon != std::string_view::npos) {
      std::string tok(spec.substr(colon + 1));
      rate = std::stod(tok);
    }
    return exponential(rate);
  }
  if (name == "unit") {
    double xi = 1.0, eta = 0.5;
    if (colon != std::string_view::npos) {
      std::string rest(spec.substr(colon + 1));
      if (std::sscanf(rest.c_str(), "%lf,%lf", &xi, &eta) != 2)
        throw std::invalid_argument("unit source needs unit:xi,eta");
    }
    return fixed(xi, eta);
  }
  return sieve(WLaw::parse(spec));
}

WalkSource WalkSource::with_zero_eta() const {
  WalkSource s = *this;
  s.zero_eta_ = true;
  s.eta_mean_ = 0.0;
  return s;
}

const WLaw& WalkSource::law() const {
  if (kind_ != Kind::sieve)
    throw std::logic_error("source has no W-law (not in sieve mode)");
  return law_;
}

std::string WalkSource::id() const {
  std::string base;
  switch (kind_) {
    case Kind::sieve:
      base = law_.id();
      break;
    case Kind::exponential:
      base = "exp:" + fmt_real(rate_);
      break;
    case Kind::fixed:
      base = "unit:" + fmt_real(xi_const_) + "," + fmt_real(eta_const_);
      break;
  }
  return zero_eta_ ? base + "+eta0" : base;
}

double WalkSource::eta_cdf(double y) const {
  if (y < 0.0) throw std::domain_error("eta_cdf requires y >= 0");
  if (zero_eta_) return 1.0;
  switch (kind_) {
    case Kind::sieve:
      return sievelab::eta_cdf(law_, y);
    case Kind::exponential:
      return -std::expm1(-rate_ * y);
    case Kind::fixed:
      return eta_const_ <= y ? 1.0 : 0.0;
  }
  throw std::logic_error("unreachable");
}

double WalkSource::centering(double t) const {
  if (t < 0.0) throw std::domain_error("centering requires t >= 0");
  // Multiply by the reciprocal: the renewal-mode centering and the scan's
  // sup deviation must agree bit for bit (sup >= |endpoint| is exact).
  if (zero_eta_) return (1.0 / xi_mean_) * t;
  switch (kind_) {
    case Kind::sieve:
      return sievelab::centering(law_, t);
    case Kind::exponential:
      // integral of 1 - e^{-r y} is t - (1 - e^{-r t})/r
      return (t + std::expm1(-rate_ * t) / rate_) / xi_mean_;
    case Kind::fixed:
      return std::max(0.0, t - eta_const_) / xi_mean_;
  }
  throw std::logic_error("unreachable");
}

void WalkSource::fill_increments(RandomStream& stream, double* xi, double* eta,
                                 std::size_t n) const {
  const auto& k = kernels::active();
  switch (kind_) {
    case Kind::sieve: {
      if (law_.kind == WKind::uniform) {
        stream.fill_uniform01(xi, n);
      } else {
        for (std::size_t i = 0; i < n; ++i) xi[i] = sample_w(law_, stream);
      }
      for (std::size_t i = 0; i < n; ++i) eta[i] = 1.0 - xi[i];
      k.neg_log(xi, xi, n);
      k.neg_log(eta, eta, n);
      break;
    }
    case Kind::exponential: {
      // One (xi, eta) draw pair per step, so the increment sequence does not
      // depend on how callers block their requests.
      double inv_rate = 1.0 / rate_;
      if (zero_eta_) {
        stream.fill_uniform01(xi, n);
        for (std::size_t i = 0; i < n; ++i) eta[i] = 0.0;
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          xi[i] = stream.next_uniform01();
          eta[i] = stream.next_uniform01();
        }
      }
      k.neg_log(xi, xi, n);
      for (std::size_t i = 0; i < n; ++i) xi[i] *= inv_rate;
      if (!zero_eta_) {
        k.neg_log(eta, eta, n);
        for (std::size_t i = 0; i < n; ++i) eta[i] *= inv_rate;
      }
      break;
    }
    case Kind::fixed: {
      double ec = zero_eta_ ? 0.0 : eta_const_;
      for (std::size_t i = 0; i < n; ++i) {
        xi[i] = xi_const_;
        eta[i] = ec;
      }
      break;
    }
  }
  if (zero_eta_ && kind_ == Kind::sieve)
    for (std::size_t i = 0; i < n; ++i) eta[i] = 0.0;
}

WalkPath::WalkPath(const WalkSource& source, std::uint64_t seed)
    : source_(source), seed_(seed), stream_(seed) {
  positions_.push_back(0.0);
}

void WalkPath::append_block(std::size_t count) {
  if (steps() + static_cast<std::int64_t>(count) > kStepCap)
    throw std::runtime_error(
        "walk step cap (1e9) exceeded; increments from " + source_.id() +
        " are too small for the requested horizon");
  xi_buf_.resize(count);
  eta_buf_.resize(count);
  source_.fill_increments(stream_, xi_buf_.data(), eta_buf_.data(), count);

  std::size_t old_sorted = perturbed_sorted_.size();
  double s = positions_.back();
  for (std::size_t i = 0; i < count; ++i) {
    double t = s + eta_buf_[i];
    perturbed_.push_back(t);
    perturbed_sorted_.push_back(t);
    double next = s + xi_buf_[i];
    if (next <= s)  // enforce strict increase under extreme rounding
      next = std::nextafter(s, std::numeric_limits<double>::infinity());
    positions_.push_back(next);
    s = next;
  }
  std::sort(perturbed_sorted_.begin() + old_sorted, perturbed_sorted_.end());
  std::inplace_merge(perturbed_sorted_.begin(),
                     perturbed_sorted_.begin() + old_sorted,
                     perturbed_sorted_.end());
}

void WalkPath::extend(double horizon) {
  // guard against a misconfigured near-zero xi law before burning memory
  double expected_steps = (horizon - positions_.back()) / source_.xi_mean();
  if (expected_steps > 2.0 * static_cast<double>(kStepCap))
    throw std::runtime_error(
        "walk step cap (1e9) exceeded; increments from " + source_.id() +
        " are too small for the requested horizon");
  while (positions_.back() <= horizon) {
    std::size_t block = std::clamp<std::size_t>(
        static_cast<std::size_t>(steps()), kMinBlock, kMaxBlock);
    append_block(block);
  }
}

void WalkPath::require_covered(double x) const {
  if (x > positions_.back())
    throw std::out_of_range("horizon exceeded (x=" + fmt_real(x) +
                            ", horizon=" + fmt_real(positions_.back()) + ")");
}

std::int64_t WalkPath::nu(double x) const {
  require_covered(x);
  return std::upper_bound(positions_.begin(), positions_.end(), x) -
         positions_.begin();
}

std::int64_t WalkPath::n_count(double x) const {
  require_covered(x);
  return std::upper_bound(perturbed_sorted_.begin(), perturbed_sorted_.end(), x) -
         perturbed_sorted_.begin();
}

std::int64_t WalkPath::rho_star(double x) {
  if (!source_.is_sieve())
    throw std::logic_error("rho_star requires a sieve-mode path");
  if (!(x >= 1.0)) throw std::domain_error("rho_star requires x >= 1");
  double lx = relax_up(std::log(x));
  extend(lx);
  return n_count(lx);
}

std::int64_t WalkPath::increment_window(double x, double delta,
                                        bool perturbed) const {
  if (!(delta > 0.0) || !(delta <= x))
    throw std::domain_error("increment_window requires 0 < delta <= x");
  require_covered(x);
  if (perturbed) return n_count(x) - n_count(x - delta);
  return nu(x) - nu(x - delta);
}

std::vector<ScanPoint> renewal_scan(const WalkSource& source, std::uint64_t seed,
                                    std::span<const double> checkpoints) {
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 0.0 || (i > 0 && checkpoints[i] < checkpoints[i - 1]))
      throw std::invalid_argument("renewal_scan checkpoints must be ascending, >= 0");
  }
  std::vector<ScanPoint> out;
  out.reserve(checkpoints.size());
  if (checkpoints.empty()) return out;

  const auto& kern = kernels::active();
  const double inv_m = 1.0 / source.xi_mean();
  RandomStream stream(seed);
  std::vector<double> buf, xi, eta;
  buf.reserve(kScanBlock + 1);
  buf.push_back(0.0);  // S_0
  double s = 0.0;
  std::int64_t k0 = 0;  // global index of buf.front()
  std::int64_t total_steps = 0;
  double run_max = 0.0;
  std::size_t c = 0;

  for (;;) {
    std::size_t processed = 0;
    while (processed < buf.size() && c < checkpoints.size()) {
      double cp = checkpoints[c];
      auto split = std::upper_bound(buf.begin() + processed, buf.end(), cp) -
                   buf.begin();
      run_max = std::max(
          run_max, kern.sup_abs_dev_block(buf.data() + processed,
                                          static_cast<std::size_t>(split) - processed,
                                          inv_m, static_cast<double>(k0) +
                                                     static_cast<double>(processed)));
      processed = static_cast<std::size_t>(split);
      if (processed < buf.size()) {  // next position exceeds cp: nu(cp) final
        std::int64_t count = k0 + static_cast<std::int64_t>(processed);
        double endpoint = std::fabs(static_cast<double>(count) - inv_m * cp);
        out.push_back({cp, count, std::max(run_max, endpoint)});
        ++c;
      } else {
        break;  // need more of the walk to settle this checkpoint
      }
    }
    if (processed < buf.size()) {  // checkpoints exhausted
      break;
    }
    if (c >= checkpoints.size()) break;

    // refill
    if (total_steps + static_cast<std::int64_t>(kScanBlock) > kStepCap)
      throw std::runtime_error("walk step cap (1e9) exceeded in renewal_scan");
    k0 += static_cast<std::int64_t>(buf.size());
    xi.resize(kScanBlock);
    eta.resize(kScanBlock);
    source.fill_increments(stream, xi.data(), eta.data(), kScanBlock);
    buf.clear();
    for (std::size_t i = 0; i < kScanBlock; ++i) {
      double next = s + xi[i];
      if (next <= s)
        next = std::nextafter(s, std::numeric_limits<double>::infinity());
      buf.push_back(next);
      s = next;
    }
    total_steps += static_cast<std::int64_t>(kScanBlock);
  }
  return out;
}

}  // namespace sievelab
