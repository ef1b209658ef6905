#include "sievelab/experiments.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "sievelab/parallel.hpp"
#include "sievelab/stats.hpp"

namespace sievelab {
namespace {

bool is_sieve_experiment(const std::string& name) {
  return name == "clt" || name == "lil" || name == "coverage" ||
         name == "approx" || name == "trace-dump";
}

LilBandParams band_params(const ExperimentConfig& cfg) {
  LilBandParams p;
  p.j_min = cfg.j_min;
  p.band_lo = cfg.band_lo;
  p.band_hi = cfg.band_hi;
  p.band_frac = cfg.band_frac;
  p.pooled_min = cfg.pooled_min;
  p.cap = cfg.cap;
  p.cap_frac = cfg.cap_frac;
  p.eps = cfg.eps;
  return p;
}

RenewalParams renewal_params(const ExperimentConfig& cfg) {
  RenewalParams p;
  p.j_min = cfg.renewal_j_min;
  p.j_max = cfg.n_exp;
  p.paths = cfg.paths;
  p.band_lo = cfg.renewal_band_lo;
  p.band_hi = cfg.renewal_band_hi;
  p.band_frac = cfg.renewal_band_frac;
  p.cap = cfg.renewal_cap;
  p.sup_mean_lo = cfg.sup_mean_lo;
  p.sup_mean_hi = cfg.sup_mean_hi;
  p.workers = cfg.effective_workers();
  return p;
}

void append_trace_rows(std::vector<ReportRow>& rows, const ExperimentConfig& cfg,
                       std::uint64_t seed, int replicate,
                       const OccupancyTrace& trace,
                       const StandardizedSeries& series) {
  for (std::size_t c = 0; c < trace.checkpoints.size(); ++c) {
    const auto& cp = trace.checkpoints[c];
    const auto& e = series.entries[c];
    ReportRow r;
    r.experiment = cfg.experiment;
    r.law = cfg.law;
    r.seed = seed;
    r.replicate = replicate;
    r.checkpoint = cp.j;
    r.n = static_cast<double>(cp.n);
    r.raw = e.raw;
    r.centering = e.centering;
    r.z = e.z;
    r.l = e.l;
    r.aux_a = static_cast<double>(cp.rho_star);
    r.aux_b = cp.theta;
    r.aux_c = cp.delta;
    r.flag = std::isnan(e.l) || std::fabs(e.l) <= cfg.cap ? 1 : 0;
    rows.push_back(r);
  }
}

ExperimentOutput run_sieve_experiment(const ExperimentConfig& cfg,
                                      std::uint64_t seed) {
  WLaw law = WLaw::parse(cfg.law);
  int paths = cfg.experiment == "clt" ? cfg.replicates : cfg.paths;
  int j_max = cfg.experiment == "clt" ? cfg.n_exp : cfg.j_max;
  ExperimentOutput out;
  out.resolved_seed = seed;

  if (cfg.experiment == "clt") {
    CltParams p;
    p.n_exp = cfg.n_exp;
    p.replicates = cfg.replicates;
    p.ks_bound = cfg.ks_bound;
    p.workers = cfg.effective_workers();
    p.ball_budget = cfg.ball_budget;
    CltResult res = clt_check(law, seed, p);
    MomentProfile profile = moment_profile(law);
    double lil = cfg.n_exp >= 3 ? scales(profile, cfg.n_exp).lil
                                : std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < cfg.replicates; ++i) {
      ReportRow r;
      r.experiment = cfg.experiment;
      r.law = cfg.law;
      r.seed = seed;
      r.replicate = i;
      r.checkpoint = cfg.n_exp;
      r.n = static_cast<double>(res.n_balls);
      r.raw = static_cast<double>(res.k_values[i]);
      r.centering = res.centering;
      r.z = res.z[i];
      r.l = (r.raw - res.centering) / lil;
      out.rows.push_back(r);
    }
    out.checks.push_back(res.report);
    return out;
  }

  auto traces = simulate_traces(law, seed, paths, j_max, cfg.ball_budget,
                                cfg.effective_workers());
  std::vector<StandardizedSeries> series;
  series.reserve(traces.size());
  for (const auto& t : traces)
    series.push_back(standardize_trace(t, law, SeriesMode::sieve_k));
  for (int i = 0; i < paths; ++i)
    append_trace_rows(out.rows, cfg, seed, i, traces[i], series[i]);

  if (cfg.experiment == "lil") {
    out.checks.push_back(lil_trace(series, band_params(cfg)));
  } else if (cfg.experiment == "coverage") {
    CoverageParams p;
    p.j_min = cfg.j_min;
    p.grid_step = cfg.grid_step;
    p.delta = cfg.delta;
    p.cover_min = cfg.cover_min;
    p.path_frac = cfg.path_frac;
    out.checks.push_back(limit_point_coverage(series, p));
  } else if (cfg.experiment == "approx") {
    out.checks.push_back(approx_check(traces, ApproxParams{cfg.j_min}));
  }
  // trace-dump: rows only
  return out;
}

ExperimentOutput run_moments(const ExperimentConfig& cfg, std::uint64_t seed) {
  WalkSource source = WalkSource::parse(cfg.law);
  ExperimentOutput out;
  out.resolved_seed = seed;

  auto run_mode = [&](bool log_domain, double y0, const std::string& gaps_csv,
                      std::uint64_t mode_seed) {
    MomentParams p;
    p.y0 = y0;
    p.gaps = parse_gap_list(gaps_csv);
    p.replicates = cfg.replicates;
    p.spread_max = cfg.spread_max;
    p.workers = cfg.effective_workers();
    p.log_domain = log_domain;
    MomentResult res = moment_ratio(source, mode_seed, p);
    for (int i = 0; i < cfg.replicates; ++i) {
      for (std::size_t g = 0; g < p.gaps.size(); ++g) {
        ReportRow r;
        r.experiment = cfg.experiment;
        r.law = cfg.law;
        r.seed = seed;
        r.replicate = i;
        r.checkpoint = p.gaps[g];
        r.n = y0 + p.gaps[g];
        r.raw = static_cast<double>(res.increments[i][g]);
        r.centering = 0.0;
        r.z = 0.0;
        r.l = 0.0;
        r.aux_a = std::pow(r.raw, 4);
        r.aux_b = log_domain ? 1.0 : 0.0;
        r.aux_c = res.ratios[g];
        out.rows.push_back(r);
      }
    }
    out.checks.push_back(res.report);
  };

  run_mode(false, cfg.y0, cfg.gaps, seed_derive(seed, 101));
  if (source.is_sieve())
    run_mode(true, cfg.rho_y0, cfg.rho_gaps, seed_derive(seed, 102));
  return out;
}

ExperimentOutput run_renewal(const ExperimentConfig& cfg, std::uint64_t seed,
                             bool sup_mode) {
  WalkSource source = WalkSource::parse(cfg.law);
  ExperimentOutput out;
  out.resolved_seed = seed;
  RenewalResult res = sup_mode ? sup_lil(source, seed, renewal_params(cfg))
                               : renewal_lil(source, seed, renewal_params(cfg));
  for (std::size_t i = 0; i < res.paths.size(); ++i) {
    const auto& path = res.paths[i];
    for (std::size_t c = 0; c < path.series.entries.size(); ++c) {
      const auto& e = path.series.entries[c];
      ReportRow r;
      r.experiment = cfg.experiment;
      r.law = cfg.law;
      r.seed = seed;
      r.replicate = static_cast<std::int64_t>(i);
      r.checkpoint = e.checkpoint;
      r.n = e.n;
      r.raw = e.raw;
      r.centering = e.centering;
      r.z = e.z;
      r.l = e.l;
      r.aux_a = path.sup_norm[c];
      r.aux_b = std::isnan(e.l) ? 0.0 : std::fabs(e.l);
      r.flag = std::isnan(e.l) || path.sup_norm[c] >= std::fabs(e.l) ? 1 : 0;
      out.rows.push_back(r);
    }
  }
  out.checks.push_back(res.report);
  return out;
}

ExperimentOutput run_strassen(const ExperimentConfig& cfg, std::uint64_t seed) {
  WalkSource source = WalkSource::parse(cfg.law);
  ExperimentOutput out;
  out.resolved_seed = seed;
  StrassenParams p;
  p.n_exp = cfg.n_exp;
  p.grid_step = cfg.strassen_step;
  p.eps = cfg.strassen_eps;
  p.paths = cfg.paths;
  p.viol_frac_max = cfg.strassen_viol_frac;
  p.workers = cfg.effective_workers();
  StrassenResult res = strassen_envelope(source, seed, p);
  const double inv_m = 1.0 / source.xi_mean();
  for (std::size_t i = 0; i < res.paths.size(); ++i) {
    const auto& path = res.paths[i];
    for (std::size_t c = 0; c < path.t.size(); ++c) {
      ReportRow r;
      r.experiment = cfg.experiment;
      r.law = cfg.law;
      r.seed = seed;
      r.replicate = static_cast<std::int64_t>(i);
      r.checkpoint = path.t[c];
      r.n = res.n * path.t[c];
      r.raw = static_cast<double>(path.counts[c]);
      r.centering = inv_m * r.n;
      r.z = 0.0;
      r.l = path.x[c];
      r.aux_a = std::sqrt(path.t[c]) + p.eps;
      r.flag = std::fabs(path.x[c]) <= r.aux_a ? 1 : 0;
      out.rows.push_back(r);
    }
  }
  out.checks.push_back(res.report);
  return out;
}

}  // namespace

bool ExperimentOutput::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::vector<double> parse_gap_list(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string tok = csv.substr(pos, comma == std::string::npos ? std::string::npos
                                                                 : comma - pos);
    out.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty gap list");
  return out;
}

std::uint64_t resolve_seed(std::uint64_t configured) {
  if (configured != 0) return configured;
  std::random_device rd;
  std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  if (s == 0) s = 0x9E3779B97F4A7C15ull;
  return s;
}

std::vector<OccupancyTrace> simulate_traces(const WLaw& law, std::uint64_t seed,
                                            int paths, int j_max,
                                            std::int64_t ball_budget,
                                            int workers) {
  std::vector<OccupancyTrace> traces(paths);
  parallel_for_index(paths, workers, [&](int i) {
    traces[i] = simulate_trace(law, seed_derive(seed, i), j_max, ball_budget);
  });
  return traces;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  std::uint64_t seed = resolve_seed(cfg.seed);
  if (is_sieve_experiment(cfg.experiment)) return run_sieve_experiment(cfg, seed);
  if (cfg.experiment == "moments") return run_moments(cfg, seed);
  if (cfg.experiment == "renewal-lil") return run_renewal(cfg, seed, false);
  if (cfg.experiment == "sup-lil") return run_renewal(cfg, seed, true);
  if (cfg.experiment == "strassen") return run_strassen(cfg, seed);
  throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");
}

int run_and_write(const ExperimentConfig& cfg, std::ostream& summary) {
  ExperimentOutput out = run_experiment(cfg);
  std::string path = cfg.out_path();
  write_csv_file(path, out.rows);
  summary << "experiment: " << cfg.experiment << "  law: " << cfg.law
          << "  seed: " << out.resolved_seed
          << (cfg.seed == 0 ? " (derived from OS entropy)" : "") << "\n"
          << "rows: " << out.rows.size() << " -> " << path << "\n";
  for (const auto& check : out.checks) print_report(summary, check);
  if (out.checks.empty()) summary << "(no checks for this experiment)\n";
  return out.all_pass() ? 0 : 1;
}

}  // namespace sievelab
