#include "sievelab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sievelab/parallel.hpp"
#include "sievelab/stats.hpp"

namespace sievelab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
 public:
  double elapsed() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

double loglog_scale(double rate, double t) {
  return std::sqrt(2.0 * rate * t * std::log(std::log(t)));
}

std::vector<double> per_path_max_l(std::span<const StandardizedSeries> series,
                                   int j_min) {
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto& s : series) {
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& e : s.entries)
      if (e.checkpoint >= j_min && !std::isnan(e.l)) mx = std::max(mx, e.l);
    out.push_back(mx);
  }
  return out;
}

const char* kProvenance =
    "thresholds from config; defaults pilot-calibrated (see README)";

}  // namespace

double CheckReport::stat(std::string_view key) const {
  for (const auto& [k, v] : stats)
    if (k == key) return v;
  throw std::out_of_range("no such stat: " + std::string(key));
}

StandardizedSeries standardize_trace(const OccupancyTrace& trace,
                                     const WLaw& law, SeriesMode mode) {
  if (mode != SeriesMode::sieve_k && mode != SeriesMode::sieve_rho)
    throw std::invalid_argument("standardize_trace handles the sieve modes");
  MomentProfile profile = moment_profile(law);
  const bool eligible = law.lil_eligible();
  StandardizedSeries out;
  out.mode = mode;
  out.source_id = trace.law_id;
  out.seed = trace.seed;
  out.entries.reserve(trace.checkpoints.size());
  for (const auto& cp : trace.checkpoints) {
    SeriesEntry e{};
    e.checkpoint = cp.j;
    e.n = static_cast<double>(cp.n);
    e.raw = static_cast<double>(mode == SeriesMode::sieve_k ? cp.k_star
                                                            : cp.rho_star);
    double j = cp.j;
    e.centering = centering(law, j);
    // sigma2 = 0 laws keep their raw trace but cannot be standardized
    e.z = eligible ? (e.raw - e.centering) / clt_scale(profile, j) : kNaN;
    e.l = eligible && j >= 3.0 ? (e.raw - e.centering) / scales(profile, j).lil
                               : kNaN;
    out.entries.push_back(e);
  }
  return out;
}

CheckReport lil_trace(std::span<const StandardizedSeries> series,
                      const LilBandParams& params) {
  Stopwatch timer;
  if (series.empty()) throw std::invalid_argument("lil_trace: empty range");
  std::int64_t in_band = 0, capped = 0, violations = 0, entries_seen = 0;
  double pooled_max = -std::numeric_limits<double>::infinity();
  double pooled_min = std::numeric_limits<double>::infinity();
  auto maxima = per_path_max_l(series, params.j_min);
  for (const auto& s : series) {
    bool path_capped = true;
    for (const auto& e : s.entries) {
      if (e.checkpoint < params.j_min || std::isnan(e.l)) continue;
      ++entries_seen;
      pooled_max = std::max(pooled_max, e.l);
      pooled_min = std::min(pooled_min, e.l);
      if (std::fabs(e.l) > params.cap) path_capped = false;
      if (std::fabs(e.l) > 1.0 + params.eps) ++violations;
    }
    if (path_capped) ++capped;
  }
  if (entries_seen == 0) throw std::invalid_argument("lil_trace: empty range");
  for (double mx : maxima)
    if (mx >= params.band_lo && mx <= params.band_hi) ++in_band;

  double n_paths = static_cast<double>(series.size());
  CheckReport rep;
  rep.name = "lil-band";
  rep.provenance = kProvenance;
  rep.stats = {
      {"paths", n_paths},
      {"band_frac", static_cast<double>(in_band) / n_paths},
      {"pooled_max", pooled_max},
      {"pooled_min", pooled_min},
      {"cap_frac", static_cast<double>(capped) / n_paths},
      {"median_max_l", median(maxima)},
      {"eps_violations", static_cast<double>(violations)},
  };
  rep.thresholds = {
      {"band_lo", params.band_lo},       {"band_hi", params.band_hi},
      {"band_frac_min", params.band_frac}, {"pooled_min", params.pooled_min},
      {"cap", params.cap},               {"cap_frac_min", params.cap_frac},
  };
  rep.pass = rep.stat("band_frac") >= params.band_frac &&
             pooled_max >= params.pooled_min &&
             rep.stat("cap_frac") >= params.cap_frac;
  rep.runtime_sec = timer.elapsed();
  return rep;
}

CheckReport limit_point_coverage(std::span<const StandardizedSeries> series,
                                 const CoverageParams& params) {
  Stopwatch timer;
  if (series.empty())
    throw std::invalid_argument("limit_point_coverage: no series");
  int n_grid = static_cast<int>(std::lround(2.0 / params.grid_step)) + 1;
  std::vector<double> grid(n_grid);
  for (int i = 0; i < n_grid; ++i) grid[i] = -1.0 + params.grid_step * i;
  int interior_lo = 1, interior_hi = n_grid - 2;  // exclude the endpoints
  if (interior_hi < interior_lo)
    throw std::invalid_argument("coverage grid too coarse");

  std::vector<double> visit_frac(n_grid, 0.0);
  int paths_clearing = 0;
  std::vector<double> coverages;
  for (const auto& s : series) {
    int visited_interior = 0;
    for (int g = 0; g < n_grid; ++g) {
      bool visited = false;
      for (const auto& e : s.entries) {
        if (e.checkpoint < params.j_min || std::isnan(e.l)) continue;
        if (std::fabs(e.l - grid[g]) <= params.delta) {
          visited = true;
          break;
        }
      }
      if (visited) {
        visit_frac[g] += 1.0;
        if (g >= interior_lo && g <= interior_hi) ++visited_interior;
      }
    }
    double coverage =
        static_cast<double>(visited_interior) / (interior_hi - interior_lo + 1);
    coverages.push_back(coverage);
    if (coverage >= params.cover_min) ++paths_clearing;
  }
  double n_paths = static_cast<double>(series.size());
  for (auto& v : visit_frac) v /= n_paths;

  CheckReport rep;
  rep.name = "coverage";
  rep.provenance = kProvenance;
  rep.stats = {
      {"paths", n_paths},
      {"median_coverage", median(coverages)},
      {"clearing_frac", static_cast<double>(paths_clearing) / n_paths},
      {"origin_visit_frac", visit_frac[(n_grid - 1) / 2]},
  };
  rep.thresholds = {{"cover_min", params.cover_min},
                    {"path_frac_min", params.path_frac}};
  rep.pass = rep.stat("clearing_frac") >= params.path_frac;
  rep.runtime_sec = timer.elapsed();
  return rep;
}

CheckReport approx_check(std::span<const OccupancyTrace> traces,
                         const ApproxParams& params) {
  Stopwatch timer;
  if (traces.empty()) throw std::invalid_argument("approx_check: no traces");
  std::vector<double> d_first, d_last, slopes;
  for (const auto& trace : traces) {
    std::vector<double> lx, ly;
    bool saw_first = false;
    double last_d = kNaN;
    for (const auto& cp : trace.checkpoints) {
      if (cp.j < params.j_min) continue;
      double d = std::fabs(static_cast<double>(cp.k_star - cp.rho_star)) /
                 std::sqrt(static_cast<double>(cp.j));
      if (!saw_first) {
        d_first.push_back(d);
        saw_first = true;
      }
      last_d = d;
      if (d > 0.0) {
        lx.push_back(std::log(static_cast<double>(cp.j)));
        ly.push_back(std::log(d));
      }
    }
    if (saw_first) d_last.push_back(last_d);
    if (lx.size() >= 2) slopes.push_back(ls_slope(lx, ly));
  }
  if (d_first.empty() || d_last.empty())
    throw std::invalid_argument("approx_check: j range produced no data");

  CheckReport rep;
  rep.name = "approx";
  rep.provenance = kProvenance;
  double med_first = median(d_first);
  double med_last = median(d_last);
  double med_slope = slopes.empty() ? kNaN : median(slopes);
  rep.stats = {
      {"paths", static_cast<double>(traces.size())},
      {"median_d_first", med_first},
      {"median_d_last", med_last},
      {"median_slope", med_slope},
      {"paths_with_slope", static_cast<double>(slopes.size())},
  };
  rep.thresholds = {{"median_shrinks", 1.0}, {"slope_below", 0.0}};
  rep.pass = med_last < med_first && !std::isnan(med_slope) && med_slope < 0.0;
  rep.runtime_sec = timer.elapsed();
  return rep;
}

CltResult clt_check(const WLaw& law, std::uint64_t seed, const CltParams& params) {
  Stopwatch timer;
  if (!law.lil_eligible())
    throw std::invalid_argument("clt_check: LIL-ineligible law " + law.id());
  if (params.replicates < 500)
    throw std::invalid_argument("clt_check requires >= 500 replicates");
  MomentProfile profile = moment_profile(law);
  auto n_balls = static_cast<std::int64_t>(
      std::floor(std::exp(static_cast<double>(params.n_exp))));
  if (n_balls > params.ball_budget)
    throw std::invalid_argument("clt_check: n exceeds the ball budget");

  CltResult res;
  res.n_balls = n_balls;
  res.centering = centering(law, params.n_exp);
  res.scale = clt_scale(profile, params.n_exp);
  res.k_values.assign(params.replicates, 0);
  parallel_for_index(params.replicates, params.workers, [&](int i) {
    OccupancyTrace trace = simulate_trace(law, seed_derive(seed, i),
                                          params.n_exp, params.ball_budget);
    res.k_values[i] = trace.checkpoints.back().k_star;
  });
  res.z.resize(params.replicates);
  for (int i = 0; i < params.replicates; ++i)
    res.z[i] = (static_cast<double>(res.k_values[i]) - res.centering) / res.scale;

  double ks = ks_statistic_normal(res.z);
  // An integer-valued statistic on a lattice with spacing 1/scale cannot get
  // closer to a continuous CDF than half the largest CDF rise per gap.
  double lattice_floor = normal_cdf(0.5 / res.scale) - 0.5;

  CheckReport rep;
  rep.name = "clt";
  rep.provenance = kProvenance;
  rep.stats = {
      {"ks", ks},
      {"ks_lattice_floor", lattice_floor},
      {"mean_z", mean(res.z)},
      {"sd_z", std::sqrt(variance(res.z))},
      {"replicates", static_cast<double>(params.replicates)},
  };
  rep.thresholds = {{"ks_bound", params.ks_bound}};
  rep.pass = ks < params.ks_bound;
  rep.runtime_sec = timer.elapsed();
  res.report = std::move(rep);
  return res;
}

MomentResult moment_ratio(const WalkSource& source, std::uint64_t seed,
                          const MomentParams& params) {
  Stopwatch timer;
  if (params.gaps.empty()) throw std::invalid_argument("moment_ratio: no gaps");
  for (double g : params.gaps)
    if (!(g > 1.0))
      throw std::invalid_argument("moment_ratio requires every gap > 1");
  if (params.replicates < 1)
    throw std::invalid_argument("moment_ratio: need replicates");
  if (params.log_domain && !source.is_sieve())
    throw std::invalid_argument("rho-mode moment_ratio needs a sieve source");

  double max_gap = *std::max_element(params.gaps.begin(), params.gaps.end());
  double horizon = params.y0 + max_gap;
  std::size_t n_gaps = params.gaps.size();

  MomentResult res;
  res.increments.assign(params.replicates, {});
  parallel_for_index(params.replicates, params.workers, [&](int i) {
    WalkPath path(source, seed_derive(seed, i));
    path.extend(horizon);
    std::int64_t base = path.n_count(params.y0);
    auto& row = res.increments[i];
    row.resize(n_gaps);
    for (std::size_t g = 0; g < n_gaps; ++g)
      row[g] = path.n_count(params.y0 + params.gaps[g]) - base;
  });

  res.ratios.resize(n_gaps);
  double worst = 0.0, best = std::numeric_limits<double>::infinity();
  std::size_t arg_worst = 0;
  for (std::size_t g = 0; g < n_gaps; ++g) {
    double acc = 0.0;
    for (int i = 0; i < params.replicates; ++i) {
      auto d = static_cast<double>(res.increments[i][g]);
      acc += d * d * d * d;
    }
    double gap4 = std::pow(params.gaps[g], 4);
    res.ratios[g] = acc / params.replicates / gap4;
    if (res.ratios[g] > worst) {
      worst = res.ratios[g];
      arg_worst = g;
    }
    best = std::min(best, res.ratios[g]);
  }
  double spread = best > 0.0 ? worst / best : std::numeric_limits<double>::infinity();

  CheckReport rep;
  rep.name = params.log_domain ? "moments-rho" : "moments-N";
  rep.provenance = kProvenance;
  rep.stats = {
      {"max_ratio", worst},
      {"min_ratio", best},
      {"spread", spread},
      {"max_at_edge",
       (arg_worst == 0 || arg_worst + 1 == n_gaps) ? 1.0 : 0.0},
      {"replicates", static_cast<double>(params.replicates)},
  };
  rep.thresholds = {{"spread_max", params.spread_max}};
  rep.pass = spread < params.spread_max;
  rep.runtime_sec = timer.elapsed();
  res.report = std::move(rep);
  return res;
}

namespace {

std::vector<RenewalPathResult> scan_renewal_paths(const WalkSource& source,
                                                  std::uint64_t seed,
                                                  const RenewalParams& params) {
  if (!(source.xi_var() > 0.0))
    throw std::invalid_argument("degenerate xi (zero variance) for " + source.id());
  if (params.j_min < 2 || params.j_max < params.j_min)
    throw std::invalid_argument("bad renewal checkpoint range");
  std::vector<double> cps;
  for (int j = params.j_min; j <= params.j_max; ++j)
    cps.push_back(std::exp(static_cast<double>(j)));

  const double inv_m = 1.0 / source.xi_mean();
  const double rate = source.xi_var() / std::pow(source.xi_mean(), 3);
  std::vector<RenewalPathResult> paths(params.paths);
  parallel_for_index(params.paths, params.workers, [&](int i) {
    std::uint64_t path_seed = seed_derive(seed, i);
    auto points = renewal_scan(source, path_seed, cps);
    RenewalPathResult& out = paths[i];
    out.series.mode = SeriesMode::renewal_nu;
    out.series.source_id = source.id();
    out.series.seed = path_seed;
    for (std::size_t c = 0; c < points.size(); ++c) {
      const auto& pt = points[c];
      SeriesEntry e{};
      e.checkpoint = params.j_min + static_cast<double>(c);
      e.n = pt.y;
      e.raw = static_cast<double>(pt.count);
      e.centering = inv_m * pt.y;  // bitwise the scan's endpoint expression
      double denom_clt = std::sqrt(rate * pt.y);
      double denom_lil = loglog_scale(rate, pt.y);
      e.z = (e.raw - e.centering) / denom_clt;
      e.l = pt.y >= 3.0 ? (e.raw - e.centering) / denom_lil : kNaN;
      out.series.entries.push_back(e);
      out.sup_norm.push_back(pt.sup_dev / denom_lil);
    }
  });
  return paths;
}

}  // namespace

RenewalResult renewal_lil(const WalkSource& source, std::uint64_t seed,
                          const RenewalParams& params) {
  Stopwatch timer;
  RenewalResult res;
  res.paths = scan_renewal_paths(source, seed, params);

  std::vector<StandardizedSeries> series;
  series.reserve(res.paths.size());
  for (auto& p : res.paths) series.push_back(p.series);
  LilBandParams band;
  band.j_min = params.j_min;
  band.band_lo = params.band_lo;
  band.band_hi = params.band_hi;
  band.band_frac = params.band_frac;
  band.cap = params.cap;
  band.cap_frac = params.cap_frac;
  // pooled_min: one path must still push into the band interior
  band.pooled_min = params.band_lo;
  CheckReport rep = lil_trace(series, band);
  rep.name = "renewal-lil";
  rep.runtime_sec = timer.elapsed();
  res.report = std::move(rep);
  return res;
}

RenewalResult sup_lil(const WalkSource& source, std::uint64_t seed,
                      const RenewalParams& params) {
  Stopwatch timer;
  RenewalResult res;
  res.paths = scan_renewal_paths(source, seed, params);

  std::vector<double> terminal, max_sup;
  std::int64_t dominance_violations = 0;
  for (const auto& p : res.paths) {
    terminal.push_back(p.sup_norm.back());
    max_sup.push_back(*std::max_element(p.sup_norm.begin(), p.sup_norm.end()));
    for (std::size_t c = 0; c < p.sup_norm.size(); ++c) {
      const auto& e = p.series.entries[c];
      if (!std::isnan(e.l) && p.sup_norm[c] < std::fabs(e.l))
        ++dominance_violations;
    }
  }

  CheckReport rep;
  rep.name = "sup-lil";
  rep.provenance = kProvenance;
  rep.stats = {
      {"terminal_mean", mean(terminal)},
      {"terminal_min", *std::min_element(terminal.begin(), terminal.end())},
      {"terminal_max", *std::max_element(terminal.begin(), terminal.end())},
      {"max_sup_mean", mean(max_sup)},
      {"dominance_violations", static_cast<double>(dominance_violations)},
      {"paths", static_cast<double>(res.paths.size())},
  };
  rep.thresholds = {{"mean_lo", params.sup_mean_lo},
                    {"mean_hi", params.sup_mean_hi},
                    {"dominance_violations_max", 0.0}};
  rep.pass = rep.stat("terminal_mean") >= params.sup_mean_lo &&
             rep.stat("terminal_mean") <= params.sup_mean_hi &&
             dominance_violations == 0;
  rep.runtime_sec = timer.elapsed();
  res.report = std::move(rep);
  return res;
}

StrassenResult strassen_envelope(const WalkSource& source, std::uint64_t seed,
                                 const StrassenParams& params) {
  Stopwatch timer;
  if (!(source.xi_var() > 0.0))
    throw std::invalid_argument("degenerate xi (zero variance) for " + source.id());
  if (!(params.grid_step > 0.0) || params.grid_step > 1.0)
    throw std::invalid_argument("strassen grid step must be in (0,1]");

  StrassenResult res;
  res.n = std::exp(static_cast<double>(params.n_exp));
  int n_grid = static_cast<int>(std::lround(1.0 / params.grid_step)) + 1;
  std::vector<double> t_grid(n_grid), cps(n_grid);
  for (int i = 0; i < n_grid; ++i) {
    t_grid[i] = std::min(1.0, i * params.grid_step);
    cps[i] = res.n * t_grid[i];
  }
  const double inv_m = 1.0 / source.xi_mean();
  const double rate = source.xi_var() / std::pow(source.xi_mean(), 3);
  const double denom = loglog_scale(rate, res.n);

  res.paths.assign(params.paths, {});
  parallel_for_index(params.paths, params.workers, [&](int i) {
    auto points = renewal_scan(source, seed_derive(seed, i), cps);
    StrassenPathResult& out = res.paths[i];
    out.t = t_grid;
    for (std::size_t c = 0; c < points.size(); ++c) {
      out.counts.push_back(points[c].count);
      double x = (static_cast<double>(points[c].count) - inv_m * points[c].y) / denom;
      out.x.push_back(x);
      if (std::fabs(x) > std::sqrt(t_grid[c]) + params.eps) out.violated = true;
    }
  });

  std::int64_t violated = 0;
  for (const auto& p : res.paths) violated += p.violated ? 1 : 0;
  double viol_frac = static_cast<double>(violated) / params.paths;

  CheckReport rep;
  rep.name = "strassen";
  rep.provenance = kProvenance;
  rep.stats = {
      {"violating_frac", viol_frac},
      {"violating_paths", static_cast<double>(violated)},
      {"paths", static_cast<double>(params.paths)},
      {"n", res.n},
  };
  rep.thresholds = {{"viol_frac_max", params.viol_frac_max}, {"eps", params.eps}};
  rep.pass = viol_frac < params.viol_frac_max;
  rep.runtime_sec = timer.elapsed();
  res.report = std::move(rep);
  return res;
}

}  // namespace sievelab
