#include "sievelab/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sievelab/kernels.hpp"

namespace sievelab {
namespace {

constexpr std::size_t kBallBatch = 8192;
constexpr double kTailLog = 27.631021115928547;  // -log(1e-12)

// Walk and ball streams are separated so the path depends on (law, seed)
// only, not on how many balls have been thrown.
constexpr std::uint64_t kWalkStreamTag = 1;
constexpr std::uint64_t kBallStreamTag = 2;

}  // namespace

std::int64_t box_index(WalkPath& path, double u) {
  if (!path.source().is_sieve())
    throw std::logic_error("box_index requires a sieve-mode path");
  if (!(u > 0.0) || u > 1.0)
    throw std::invalid_argument("box_index requires u in (0,1]");
  double e;
  kernels::active().neg_log(&u, &e, 1);
  if (e < 0.0) e = 0.0;  // u == 1 maps to the first box
  path.extend(e);
  return path.nu(e);
}

ThetaDelta theta_delta(WalkPath& path, std::int64_t n) {
  if (!path.source().is_sieve())
    throw std::logic_error("theta_delta requires a sieve-mode path");
  if (n < 1) throw std::domain_error("theta_delta requires n >= 1");
  double log_n = std::log(static_cast<double>(n));
  path.extend(log_n + kTailLog);  // residual tail mass below 1e-12/n
  auto T = path.perturbed_points();
  auto sums = kernels::active().theta_delta(T.data(), T.size(),
                                            static_cast<double>(n),
                                            relax_up(log_n));
  double tail = static_cast<double>(n) * std::exp(-path.horizon());
  return {sums.theta, sums.delta, tail};
}

BallAllocator::BallAllocator(const WLaw& law, std::uint64_t seed)
    : path_(WalkSource::sieve(law), seed_derive(seed, kWalkStreamTag)),
      balls_(seed_derive(seed, kBallStreamTag)) {
  ubuf_.resize(kBallBatch);
  ebuf_.resize(kBallBatch);
}

void BallAllocator::enable_histogram() { track_histogram_ = true; }

std::int64_t BallAllocator::throw_balls(std::int64_t count) {
  std::int64_t newly = 0;
  const auto& kern = kernels::active();
  while (count > 0) {
    std::size_t m = static_cast<std::size_t>(
        std::min<std::int64_t>(count, static_cast<std::int64_t>(kBallBatch)));
    balls_.fill_uniform01(ubuf_.data(), m);
    kern.neg_log(ubuf_.data(), ebuf_.data(), m);
    for (std::size_t i = 0; i < m; ++i) {
      double e = ebuf_[i];
      if (e > path_.horizon()) path_.extend(e);
      auto pos = path_.positions();
      std::int64_t box =
          std::upper_bound(pos.begin(), pos.end(), e) - pos.begin();
      if (box > max_box_) max_box_ = box;
      std::size_t word = static_cast<std::size_t>(box - 1) >> 6;
      std::uint64_t bit = 1ull << ((box - 1) & 63);
      if (word >= occupied_.size()) occupied_.resize(word + 1, 0);
      if (!(occupied_[word] & bit)) {
        occupied_[word] |= bit;
        ++k_star_;
        ++newly;
      }
      if (track_histogram_) {
        if (static_cast<std::size_t>(box) >= histogram_.size())
          histogram_.resize(box + 1, 0);
        ++histogram_[box];
      }
    }
    thrown_ += static_cast<std::int64_t>(m);
    count -= static_cast<std::int64_t>(m);
  }
  return newly;
}

OccupancyTrace simulate_trace(const WLaw& law, std::uint64_t seed, int j_max,
                              std::int64_t ball_budget) {
  if (j_max < 1) throw std::domain_error("simulate_trace requires j_max >= 1");
  OccupancyTrace trace;
  trace.law_id = law.id();
  trace.seed = seed;
  trace.j_max = j_max;

  BallAllocator alloc(law, seed);
  for (int j = 1; j <= j_max; ++j) {
    auto n_j = static_cast<std::int64_t>(
        std::floor(std::exp(static_cast<double>(j))));
    if (n_j > ball_budget) {
      trace.truncated = true;
      break;
    }
    alloc.throw_balls(n_j - alloc.balls_thrown());

    WalkPath& path = alloc.path();
    double jx = relax_up(static_cast<double>(j));
    path.extend(jx);
    TraceCheckpoint cp;
    cp.j = j;
    cp.n = n_j;
    cp.k_star = alloc.k_star();
    cp.rho_star = path.n_count(jx);
    ThetaDelta td = theta_delta(path, n_j);
    cp.theta = td.theta;
    cp.delta = td.delta;
    cp.delta_tail = td.tail_bound;
    trace.checkpoints.push_back(cp);
  }
  trace.max_box = alloc.max_box();
  return trace;
}

namespace {

void brute_force_rec(std::span<const double> p, std::size_t box,
                     int remaining, double weight, int occupied,
                     std::vector<double>& out) {
  if (box + 1 == p.size()) {
    double w = weight * std::pow(p[box], remaining);
    out[occupied + (remaining > 0 ? 1 : 0)] += w;
    return;
  }
  // choose(remaining, c) weights via the multiplicative recurrence
  double choose = 1.0;
  double pk_pow = 1.0;
  for (int c = 0; c <= remaining; ++c) {
    brute_force_rec(p, box + 1, remaining - c, weight * choose * pk_pow,
                    occupied + (c > 0 ? 1 : 0), out);
    choose = choose * (remaining - c) / (c + 1);
    pk_pow *= p[box];
  }
}

}  // namespace

std::vector<double> brute_force_k_distribution(std::span<const double> p, int n) {
  if (n < 1 || n > 8)
    throw std::invalid_argument("brute force oracle is sized for 1 <= n <= 8");
  if (p.empty() || p.size() > 8)
    throw std::invalid_argument("brute force oracle needs 1..8 boxes");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::invalid_argument("probabilities must be >= 0");
    total += v;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("probabilities must sum to 1");
  std::vector<double> out(p.size() + 1, 0.0);
  brute_force_rec(p, 0, n, 1.0, 0, out);
  return out;
}

}  // namespace sievelab
