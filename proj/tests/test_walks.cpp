#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sievelab/rng.hpp"
#include "sievelab/walks.hpp"

using namespace sievelab;

TEST_CASE("unit-step walk: extension and nu") {
  WalkPath path(WalkSource::fixed(1.0, 0.5), 1);
  path.extend(5.0);
  CHECK(path.horizon() > 5.0);
  auto pos = path.positions();
  for (int k = 0; k <= 5; ++k) CHECK(pos[k] == static_cast<double>(k));
  CHECK(path.nu(3.5) == 4);  // 0,1,2,3
  CHECK(path.nu(0.0) == 1);  // only S_0
  CHECK(path.n_count(3.2) == 3);  // 0.5, 1.5, 2.5
  CHECK(path.n_count(0.4) == 0);
  CHECK_THROWS_AS(path.nu(path.horizon() + 1.0), std::out_of_range);
}

TEST_CASE("extension is idempotent and consistent") {
  WalkSource src = WalkSource::sieve(WLaw::parse("uniform"));
  WalkPath a(src, 99);
  a.extend(10.0);
  std::vector<double> at10(a.positions().begin(), a.positions().end());
  a.extend(10.0);  // no-op
  CHECK(a.positions().size() == at10.size());
  a.extend(20.0);

  WalkPath b(src, 99);
  b.extend(20.0);
  REQUIRE(a.positions().size() == b.positions().size());
  for (std::size_t i = 0; i < a.positions().size(); ++i)
    CHECK(a.positions()[i] == b.positions()[i]);
  for (std::size_t i = 0; i < at10.size(); ++i)
    CHECK(b.positions()[i] == at10[i]);

  // counts at any x below the old horizon are unchanged by extension
  for (double x : {0.5, 3.0, 7.7, 9.9}) {
    CHECK(a.nu(x) == b.nu(x));
    CHECK(a.n_count(x) == b.n_count(x));
  }
}

TEST_CASE("rho_star on the dyadic sieve") {
  WalkPath path(WalkSource::sieve(WLaw::parse("det:0.5")), 7);
  CHECK(path.rho_star(8.0) == 3);   // p_k = 2^-k >= 1/8 for k <= 3
  CHECK(path.rho_star(1.0) == 0);   // every p_k < 1
  CHECK(path.rho_star(1024.0) == 10);
  CHECK_THROWS_AS(path.rho_star(0.5), std::domain_error);

  WalkPath generic(WalkSource::exponential(1.0), 7);
  CHECK_THROWS_AS(generic.rho_star(8.0), std::logic_error);
}

TEST_CASE("rho_star equals a probability-space brute force over frequencies") {
  // direct route: materialize p*_k = R_{k-1} - R_k from the W draws and
  // count p*_k >= 1/x; must match N*(log x) path by path
  RandomStream outer(5150);
  for (int rep = 0; rep < 1000; ++rep) {
    std::uint64_t seed = outer.next_u64();
    double x = 1.0 + 1000.0 * outer.next_uniform01();
    WLaw law = rep % 2 ? WLaw::parse("uniform") : WLaw::parse("beta:2,3");

    WalkPath path(WalkSource::sieve(law), seed);
    std::int64_t via_counts = path.rho_star(x);

    RandomStream ws(seed);
    double r_prev = 1.0;
    std::int64_t direct = 0;
    for (int k = 1; k < 10000; ++k) {
      double w = sample_w(law, ws);
      double r = r_prev * w;
      double p = r_prev - r;
      if (p >= 1.0 / x) ++direct;
      r_prev = r;
      if (r < 1e-9 / x) break;  // no further box can be large
    }
    CHECK(via_counts == direct);
  }
}

TEST_CASE("N <= nu and both counts are monotone along a path") {
  WalkPath path(WalkSource::sieve(WLaw::parse("uniform")), 31);
  path.extend(30.0);
  std::int64_t prev_nu = -1, prev_n = -1;
  for (double x = 0.0; x <= 30.0; x += 0.37) {
    std::int64_t nu = path.nu(x);
    std::int64_t n = path.n_count(x);
    CHECK(n <= nu);
    CHECK(nu >= prev_nu);
    CHECK(n >= prev_n);
    prev_nu = nu;
    prev_n = n;
  }
  CHECK(path.nu(30.0) <= path.steps() + 1);
}

TEST_CASE("renewal identity: E nu(x) = x + 1 for exponential increments") {
  // {S_k, k>=1} is a rate-1 Poisson process, so nu(x) - 1 ~ Poisson(x)
  const int paths = 10000;
  const double x = 10.0;
  double acc = 0.0;
  for (int i = 0; i < paths; ++i) {
    WalkPath path(WalkSource::exponential(1.0), seed_derive(1234, i));
    path.extend(x);
    acc += static_cast<double>(path.nu(x));
  }
  double mean = acc / paths;
  double se = std::sqrt(x / paths);  // var = x
  CHECK(std::fabs(mean - (x + 1.0)) < 3 * se);
}

TEST_CASE("increment_window: deterministic walk and empty windows") {
  WalkPath path(WalkSource::fixed(1.0, 0.5), 3);
  path.extend(10.0);
  CHECK(path.increment_window(5.2, 1.0) == 1);  // one perturbed point per unit
  CHECK(path.increment_window(0.4, 0.3) == 0);
  CHECK(path.increment_window(5.2, 1.0, false) == 1);
  CHECK_THROWS_AS(path.increment_window(5.0, 6.0), std::domain_error);
}

TEST_CASE("scaled window increments shrink (MC oracle)") {
  // E[N(n) - N(n-1)] -> 1/mu = 1, so the sqrt(n)-scaled mean sits near
  // 1/sqrt(n); assert the oracle value and the decay in n.
  auto scaled_mean = [](double n, int paths) {
    double acc = 0.0;
    for (int i = 0; i < paths; ++i) {
      WalkPath path(WalkSource::sieve(WLaw::parse("uniform")),
                    seed_derive(777, i));
      path.extend(n);
      acc += static_cast<double>(path.increment_window(n, 1.0)) / std::sqrt(n);
    }
    return acc / paths;
  };
  double at100 = scaled_mean(100.0, 2000);
  CHECK(at100 > 0.05);
  CHECK(at100 < 0.15);  // near 1/sqrt(100)
  double at2500 = scaled_mean(2500.0, 400);
  CHECK(at2500 < 0.5 * at100);  // ~1/sqrt(n) decay
}

TEST_CASE("strong law: nu(x)/x within 2% of 1/mu on nearly every path") {
  const double x = 1e5;
  const int paths = 200;
  int ok = 0;
  for (int i = 0; i < paths; ++i) {
    WalkPath path(WalkSource::sieve(WLaw::parse("uniform")),
                  seed_derive(4242, i));
    path.extend(x);
    double ratio = static_cast<double>(path.nu(x)) / x;
    if (std::fabs(ratio - 1.0) < 0.02) ++ok;
  }
  CHECK(ok >= 190);
}

TEST_CASE("zero-eta source makes the perturbed points the walk itself") {
  WalkSource src = WalkSource::exponential(1.0).with_zero_eta();
  WalkPath path(src, 8);
  path.extend(50.0);
  for (double x = 0.0; x <= 50.0; x += 1.7)
    CHECK(path.nu(x) == path.n_count(x));
}

TEST_CASE("renewal_scan: unit steps give sup exactly 1 and exact counts") {
  std::vector<double> cps = {0.0, 2.5, 10.0, 100.0};
  auto pts = renewal_scan(WalkSource::fixed(1.0, 0.5), 11, cps);
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].count == 1);
  CHECK(pts[1].count == 3);
  CHECK(pts[2].count == 11);
  CHECK(pts[3].count == 101);
  for (const auto& p : pts) CHECK(p.sup_dev == 1.0);
}

TEST_CASE("renewal_scan agrees with a stored path") {
  WalkSource src = WalkSource::exponential(1.0);
  std::vector<double> cps = {1.0, 7.0, 42.0, 199.0};
  auto pts = renewal_scan(src, 5151, cps);

  WalkPath path(src, 5151);
  path.extend(250.0);
  for (std::size_t c = 0; c < cps.size(); ++c)
    CHECK(pts[c].count == path.nu(cps[c]));

  // exact sup recomputed from the stored jump points
  for (std::size_t c = 0; c < cps.size(); ++c) {
    double sup = 0.0;
    auto pos = path.positions();
    std::int64_t count = path.nu(cps[c]);
    for (std::int64_t k = 0; k < count; ++k) {
      sup = std::max(sup, std::fabs(static_cast<double>(k + 1) - pos[k]));
      sup = std::max(sup, std::fabs(static_cast<double>(k) - pos[k]));
    }
    sup = std::max(sup, std::fabs(static_cast<double>(count) - cps[c]));
    CHECK(pts[c].sup_dev == doctest::Approx(sup).epsilon(1e-15));
  }
}

TEST_CASE("walk source parsing") {
  CHECK(WalkSource::parse("uniform").is_sieve());
  CHECK(WalkSource::parse("exp:2.0").xi_mean() == 0.5);
  CHECK(WalkSource::parse("unit:1.0,0.5").xi_var() == 0.0);
  CHECK_THROWS_AS(WalkSource::parse("exp:0"), std::invalid_argument);
  CHECK_THROWS_AS(WalkSource::parse("nonsense:1"), std::invalid_argument);
}

TEST_CASE("near-zero increments trip the step cap diagnostic") {
  WalkPath path(WalkSource::fixed(1e-12, 0.5), 1);
  CHECK_THROWS_AS(path.extend(1.0), std::runtime_error);
}

TEST_CASE("count snapshots are internally consistent and monotone") {
  WalkPath path(WalkSource::sieve(WLaw::parse("uniform")), 64);
  path.extend(20.0);
  CountSnapshot prev = path.snapshot(0.0);
  CHECK(prev.nu == 1);
  for (double x = 0.5; x <= 20.0; x += 0.5) {
    CountSnapshot s = path.snapshot(x);
    CHECK(s.n_of_x <= s.nu);
    CHECK(s.nu >= prev.nu);
    CHECK(s.n_of_x >= prev.n_of_x);
    prev = s;
  }
}
