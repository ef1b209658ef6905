#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sievelab/laws.hpp"
#include "sievelab/rng.hpp"

namespace sievelab {

// Producer of i.i.d. (xi, eta) increment pairs. Sieve mode is the map
// xi = |log W|, eta = |log(1-W)| with both drawn from one W (the dependence
// the sieve forces); the generic modes document their own pairing:
// exponential draws xi and eta independently, fixed uses constants.
class WalkSource {
 public:
  enum class Kind { sieve, exponential, fixed };

  static WalkSource sieve(const WLaw& law);
  static WalkSource exponential(double rate);
  static WalkSource fixed(double xi, double eta);

  // Sieve law grammar plus exp:rate and unit:xi,eta.
  static WalkSource parse(std::string_view spec);

  // Same xi stream, eta forced to 0 (N(x) == nu(x)); cross-check use only.
  WalkSource with_zero_eta() const;

  Kind kind() const { return kind_; }
  bool is_sieve() const { return kind_ == Kind::sieve; }
  bool zero_eta() const { return zero_eta_; }
  const WLaw& law() const;
  std::string id() const;

  double xi_mean() const { return xi_mean_; }
  double xi_var() const { return xi_var_; }
  double eta_mean() const { return eta_mean_; }
  double eta_cdf(double y) const;

  // xi_mean^{-1} * integral_0^t F_eta(y) dy
  double centering(double t) const;

  // Appends n pairs; buffers may not partially alias. Draw consumption is
  // strictly sequential so paths are reproducible from (source, seed).
  void fill_increments(RandomStream& stream, double* xi, double* eta,
                       std::size_t n) const;

 private:
  WalkSource() = default;
  Kind kind_ = Kind::fixed;
  WLaw law_{};
  double rate_ = 1.0;
  double xi_const_ = 1.0, eta_const_ = 0.5;
  bool zero_eta_ = false;
  double xi_mean_ = 0.0, xi_var_ = 0.0, eta_mean_ = 0.0;
};

// Nudges a count threshold up by a few ulps so indicator ties ("<= x") land
// on the counted side when the threshold itself was rounded (deterministic
// laws hit exact ties; continuous laws never see the window).
double relax_up(double x);

struct CountSnapshot {
  double x = 0.0;
  std::int64_t nu = 0;       // walk points <= x
  std::int64_t n_of_x = 0;   // perturbed points <= x; never exceeds nu
};

// One realization of the walk S_0 = 0 < S_1 < ... with its perturbed points
// T_k = S_k + eta_{k+1}. Extending the horizon never changes materialized
// entries: increments are drawn in state-dependent block sizes, so
// extend(a); extend(b) leaves the same path as extend(b).
class WalkPath {
 public:
  WalkPath(const WalkSource& source, std::uint64_t seed);

  // Materializes positions until the last one exceeds `horizon`.
  void extend(double horizon);

  double horizon() const { return positions_.back(); }
  std::int64_t steps() const { return static_cast<std::int64_t>(positions_.size()) - 1; }

  // nu(x) = #{k >= 0 : S_k <= x}; requires x <= horizon().
  std::int64_t nu(double x) const;

  // N(x) = #{k >= 0 : S_k + eta_{k+1} <= x}; requires x <= horizon().
  std::int64_t n_count(double x) const;

  // Number of large boxes rho*(x) = N*(log x); sieve mode, x >= 1.
  // Extends the path on demand.
  std::int64_t rho_star(double x);

  // N(x) - N(x - delta) (or nu when perturbed = false).
  std::int64_t increment_window(double x, double delta, bool perturbed = true) const;

  CountSnapshot snapshot(double x) const { return {x, nu(x), n_count(x)}; }

  std::span<const double> positions() const { return positions_; }
  std::span<const double> perturbed_points() const { return perturbed_; }

  const WalkSource& source() const { return source_; }
  std::uint64_t seed() const { return seed_; }

 private:
  void append_block(std::size_t count);
  void require_covered(double x) const;

  WalkSource source_;
  std::uint64_t seed_;
  RandomStream stream_;
  std::vector<double> positions_;         // S_0..S_K, strictly increasing
  std::vector<double> perturbed_;         // T_k by index
  std::vector<double> perturbed_sorted_;  // sorted shadow for counting
  std::vector<double> xi_buf_, eta_buf_;
};

struct ScanPoint {
  double y;             // checkpoint
  std::int64_t count;   // nu(y)
  double sup_dev;       // sup_{0<=u<=y} |nu(u) - inv_m * u|
};

// Streams a walk through ascending checkpoints without storing it; the sup
// is exact (evaluated at every jump of nu and at each checkpoint).
std::vector<ScanPoint> renewal_scan(const WalkSource& source, std::uint64_t seed,
                                    std::span<const double> checkpoints);

}  // namespace sievelab
