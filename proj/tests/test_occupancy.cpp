#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "sievelab/occupancy.hpp"
#include "sievelab/rng.hpp"

using namespace sievelab;

namespace {

WalkPath dyadic_path(std::uint64_t seed = 1) {
  return WalkPath(WalkSource::sieve(WLaw::parse("det:0.5")), seed);
}

}  // namespace

TEST_CASE("box_index on dyadic boxes") {
  WalkPath path = dyadic_path();
  CHECK(box_index(path, std::exp(-1.0)) == 2);  // 0.368 in (1/4, 1/2]
  CHECK(box_index(path, 1.0) == 1);
  CHECK(box_index(path, 0.6) == 1);
  CHECK(box_index(path, 0.25) == 3);  // boxes are left-open: 0.25 in (R_3, R_2]
  CHECK(box_index(path, 1e-6) == 20);
  CHECK_THROWS_AS(box_index(path, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(box_index(path, 1.5), std::invalid_argument);
}

TEST_CASE("dyadic box frequencies match 2^-k (MC)") {
  WalkPath path = dyadic_path();
  RandomStream balls(777);
  const int n = 100000;
  std::vector<int> counts(40, 0);
  for (int i = 0; i < n; ++i) {
    auto b = box_index(path, balls.next_uniform01());
    if (b < 40) ++counts[b];
  }
  for (int k = 1; k <= 5; ++k) {
    double p = std::pow(2.0, -k);
    double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::fabs(static_cast<double>(counts[k]) / n - p) <= 3 * se);
  }
}

TEST_CASE("one ball occupies exactly one box") {
  BallAllocator alloc(WLaw::parse("uniform"), 5);
  alloc.throw_balls(1);
  CHECK(alloc.k_star() == 1);
  CHECK(alloc.balls_thrown() == 1);
}

TEST_CASE("checkpoints are the floors of e^j") {
  OccupancyTrace t = simulate_trace(WLaw::parse("uniform"), 3, 3);
  REQUIRE(t.checkpoints.size() == 3);
  CHECK(t.checkpoints[0].n == 2);
  CHECK(t.checkpoints[1].n == 7);
  CHECK(t.checkpoints[2].n == 20);
  CHECK(!t.truncated);
}

TEST_CASE("ball budget truncates the trace") {
  OccupancyTrace t = simulate_trace(WLaw::parse("uniform"), 3, 6, 100);
  CHECK(t.truncated);
  REQUIRE(t.checkpoints.size() == 4);  // e^5 ~ 148 > 100
  CHECK(t.checkpoints.back().n == 54);
}

TEST_CASE("dyadic E K*_2 = 5/3 (MC against the analytic mean)") {
  const int reps = 100000;
  double acc = 0.0;
  for (int i = 0; i < reps; ++i) {
    BallAllocator alloc(WLaw::parse("det:0.5"), seed_derive(99, i));
    alloc.throw_balls(2);
    acc += static_cast<double>(alloc.k_star());
  }
  double mean = acc / reps;
  // K-1 ~ Bernoulli(2/3): var = 2/9
  double se = std::sqrt(2.0 / 9.0 / reps);
  CHECK(std::fabs(mean - 5.0 / 3.0) < 3 * se);
}

TEST_CASE("theta and delta on dyadic frequencies") {
  WalkPath path = dyadic_path();
  ThetaDelta td4 = theta_delta(path, 4);
  CHECK(td4.theta == doctest::Approx(std::exp(-2.0) + std::exp(-1.0)).epsilon(1e-9));
  CHECK(td4.delta == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(td4.tail_bound <= 1e-12);

  ThetaDelta td1 = theta_delta(path, 1);
  CHECK(td1.theta == 0.0);  // every p_k < 1
}

TEST_CASE("brute force K distribution: degenerate and coin-flip cases") {
  std::vector<double> single = {1.0};
  auto d1 = brute_force_k_distribution(single, 5);
  CHECK(d1[1] == doctest::Approx(1.0).epsilon(1e-15));

  std::vector<double> fair = {0.5, 0.5};
  auto d2 = brute_force_k_distribution(fair, 2);
  CHECK(d2[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d2[2] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("brute force matches the occupancy mean formula") {
  std::vector<double> p = {0.5, 0.25, 0.25};
  auto dist = brute_force_k_distribution(p, 3);
  double total = 0.0, ek = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    total += dist[k];
    ek += static_cast<double>(k) * dist[k];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  double expected = 0.0;
  for (double pk : p) expected += 1.0 - std::pow(1.0 - pk, 3);
  CHECK(ek == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("brute force guards its size limits") {
  std::vector<double> p = {0.5, 0.5};
  CHECK_THROWS_AS(brute_force_k_distribution(p, 9), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_k_distribution(p, 0), std::invalid_argument);
  std::vector<double> bad = {0.5, 0.6};
  CHECK_THROWS_AS(brute_force_k_distribution(bad, 2), std::invalid_argument);
  std::vector<double> nine(9, 1.0 / 9.0);
  CHECK_THROWS_AS(brute_force_k_distribution(nine, 2), std::invalid_argument);
}

TEST_CASE("histogram representation: K equals the occupied-count identity") {
  BallAllocator alloc(WLaw::parse("uniform"), 2718);
  alloc.enable_histogram();
  alloc.throw_balls(5000);
  auto hist = alloc.histogram();
  std::int64_t occupied = 0, balls = 0;
  for (std::size_t k = 1; k < hist.size(); ++k) {
    if (hist[k] >= 1) ++occupied;
    balls += hist[k];
  }
  CHECK(occupied == alloc.k_star());
  CHECK(balls == alloc.balls_thrown());
}

TEST_CASE("multinomial indicator identity holds exactly over 200 sequences") {
  RandomStream s(1618);
  for (int rep = 0; rep < 200; ++rep) {
    int len = 1 + static_cast<int>(s.next_u64() % 40);
    std::vector<int> a(len);
    for (auto& v : a) v = static_cast<int>(s.next_u64() & 1);

    std::int64_t s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int i = 0; i < len; ++i) s1 += a[i];
    for (int j = 0; j < len; ++j)
      for (int i = j + 1; i < len; ++i) s2 += a[j] * a[i];
    for (int j = 0; j < len; ++j)
      for (int i = j + 1; i < len; ++i)
        for (int l = i + 1; l < len; ++l) s3 += a[j] * a[i] * a[l];
    for (int j = 0; j < len; ++j)
      for (int i = j + 1; i < len; ++i)
        for (int l = i + 1; l < len; ++l)
          for (int m = l + 1; m < len; ++m) s4 += a[j] * a[i] * a[l] * a[m];

    CHECK(s1 * s1 * s1 * s1 == s1 + 14 * s2 + 36 * s3 + 24 * s4);
  }
}

TEST_CASE("occupancy sandwich: |K_n - #large| bounded by misses plus strays") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    BallAllocator alloc(WLaw::parse("uniform"), seed);
    alloc.enable_histogram();
    const std::int64_t n = 2000;
    alloc.throw_balls(n);
    WalkPath& path = alloc.path();
    theta_delta(path, n);  // forces materialization of every relevant box

    auto hist = alloc.histogram();
    auto T = path.perturbed_points();
    double log_n = std::log(static_cast<double>(n));
    std::int64_t large = 0, missed_large = 0, occupied_small = 0;
    for (std::size_t k = 0; k < T.size(); ++k) {
      bool is_large = T[k] <= log_n;  // n p_{k+1} >= 1
      std::int64_t z =
          k + 1 < hist.size() ? hist[k + 1] : 0;
      if (is_large) {
        ++large;
        if (z == 0) ++missed_large;
      } else if (z >= 1) {
        ++occupied_small;
      }
    }
    CHECK(std::llabs(alloc.k_star() - large) <= missed_large + occupied_small);
  }
}

TEST_CASE("conditional mean: MC matches sum(1-(1-p_k)^n) on a frozen path") {
  // freeze one frequency vector, then Monte Carlo over ball streams only
  WLaw law = WLaw::parse("uniform");
  WalkPath frozen(WalkSource::sieve(law), seed_derive(31337, 1));
  frozen.extend(40.0);
  auto T = frozen.perturbed_points();

  for (std::int64_t n : {10, 100, 1000}) {
    double expected = 0.0;
    std::vector<double> p;
    for (double t : T) {
      double pk = std::exp(-t);
      p.push_back(pk);
      expected += 1.0 - std::pow(1.0 - pk, static_cast<double>(n));
    }
    const int reps = 4000;
    double acc = 0.0, acc2 = 0.0;
    RandomStream balls(909);
    for (int r = 0; r < reps; ++r) {
      std::vector<std::uint8_t> hit(p.size() + 1, 0);
      std::int64_t k = 0;
      for (std::int64_t b = 0; b < n; ++b) {
        double e = -std::log(balls.next_uniform01());
        if (e >= frozen.horizon()) continue;  // beyond materialized boxes
        std::size_t box = frozen.nu(e);
        if (box < hit.size() && !hit[box]) {
          hit[box] = 1;
          ++k;
        }
      }
      acc += static_cast<double>(k);
      acc2 += static_cast<double>(k) * static_cast<double>(k);
    }
    double mean = acc / reps;
    double var = acc2 / reps - mean * mean;
    double se = std::sqrt(var / reps);
    CHECK(std::fabs(mean - expected) < 3 * se + 1e-9);
  }
}

TEST_CASE("traces are bit-deterministic in (law, seed, j_max)") {
  OccupancyTrace a = simulate_trace(WLaw::parse("beta:2,3"), 77, 6);
  OccupancyTrace b = simulate_trace(WLaw::parse("beta:2,3"), 77, 6);
  REQUIRE(a.checkpoints.size() == b.checkpoints.size());
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    CHECK(a.checkpoints[i].k_star == b.checkpoints[i].k_star);
    CHECK(a.checkpoints[i].rho_star == b.checkpoints[i].rho_star);
    CHECK(a.checkpoints[i].theta == b.checkpoints[i].theta);
    CHECK(a.checkpoints[i].delta == b.checkpoints[i].delta);
  }
  CHECK(a.max_box == b.max_box);
}

TEST_CASE("trace rho column equals a walks recomputation on the same path") {
  WLaw law = WLaw::parse("uniform");
  std::uint64_t seed = 424242;
  OccupancyTrace trace = simulate_trace(law, seed, 8);
  // the walk stream is derived from (seed, tag=1); rebuild it directly
  WalkPath path(WalkSource::sieve(law), seed_derive(seed, 1));
  for (const auto& cp : trace.checkpoints)
    CHECK(cp.rho_star == path.rho_star(std::exp(static_cast<double>(cp.j))));
}

TEST_CASE("trace invariants: K* accumulates and stays within bounds") {
  for (const char* spec : {"uniform", "beta:2,3"}) {
    CAPTURE(spec);
    OccupancyTrace t = simulate_trace(WLaw::parse(spec), 1312, 9);
    std::int64_t prev = 0;
    for (const auto& cp : t.checkpoints) {
      CHECK(cp.k_star >= prev);
      CHECK(cp.k_star <= cp.n);
      CHECK(cp.k_star <= t.max_box);
      CHECK(cp.rho_star >= 0);
      CHECK(cp.theta >= 0.0);
      CHECK(cp.delta >= 0.0);
      prev = cp.k_star;
    }
  }
}
