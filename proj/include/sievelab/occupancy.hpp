#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sievelab/laws.hpp"
#include "sievelab/walks.hpp"

namespace sievelab {

struct TraceCheckpoint {
  int j = 0;                 // checkpoint index, n_j = [e^j]
  std::int64_t n = 0;        // balls thrown so far
  std::int64_t k_star = 0;   // occupied boxes
  std::int64_t rho_star = 0; // large boxes rho*(e^j)
  double theta = 0.0;
  double delta = 0.0;
  double delta_tail = 0.0;   // analytic bound on the unmaterialized tail
};

// Per-replicate record of one consistent (W_k) realization observed at the
// geometric checkpoints n_j = [e^j]. Walk and ball draws come from separate
// derived streams, so the path is re-derivable from (law, seed) alone.
struct OccupancyTrace {
  std::string law_id;
  std::uint64_t seed = 0;
  int j_max = 0;
  bool truncated = false;       // ball budget hit before j_max
  std::int64_t max_box = 0;     // largest box index any ball reached
  std::vector<TraceCheckpoint> checkpoints;
};

struct ThetaDelta {
  double theta;
  double delta;
  double tail_bound;  // n * R_K for the boxes never materialized
};

// The box the point u lands in: the unique b >= 1 with R_b < u <= R_{b-1},
// computed as #{k >= 0 : S_k <= -log u}. Extends the path on demand.
std::int64_t box_index(WalkPath& path, double u);

// Theta_n and Delta_n over the materialized frequencies, extending the path
// until the residual tail mass is below 1e-12/n.
ThetaDelta theta_delta(WalkPath& path, std::int64_t n);

OccupancyTrace simulate_trace(const WLaw& law, std::uint64_t seed, int j_max,
                              std::int64_t ball_budget = 100'000'000);

// Exact distribution of the number of occupied boxes (index = K value) for
// a finite probability vector, by enumerating all allocations. Oracle-sized:
// n <= 8 balls, <= 8 boxes.
std::vector<double> brute_force_k_distribution(std::span<const double> p, int n);

// Incremental first-hit allocator; exposed so tests can drive balls one at
// a time and keep the full histogram alongside.
class BallAllocator {
 public:
  BallAllocator(const WLaw& law, std::uint64_t seed);

  // Throws `count` balls; returns the number of newly occupied boxes.
  std::int64_t throw_balls(std::int64_t count);

  std::int64_t k_star() const { return k_star_; }
  std::int64_t balls_thrown() const { return thrown_; }
  std::int64_t max_box() const { return max_box_; }
  WalkPath& path() { return path_; }

  // Ball counts Z_{n,k} per box (1-based index), when tracking is on.
  void enable_histogram();
  std::span<const std::int64_t> histogram() const { return histogram_; }

 private:
  WalkPath path_;
  RandomStream balls_;
  std::vector<std::uint64_t> occupied_;
  std::vector<std::int64_t> histogram_;
  bool track_histogram_ = false;
  std::int64_t k_star_ = 0;
  std::int64_t thrown_ = 0;
  std::int64_t max_box_ = 0;
  std::vector<double> ubuf_, ebuf_;
};

}  // namespace sievelab
