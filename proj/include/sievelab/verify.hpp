#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sievelab/laws.hpp"
#include "sievelab/occupancy.hpp"
#include "sievelab/walks.hpp"

namespace sievelab {

enum class SeriesMode { sieve_k, sieve_rho, generic_n, renewal_nu };

struct SeriesEntry {
  double checkpoint;  // j; the walk modes use t = e^j
  double n;           // balls n_j (sieve modes) or the time t
  double raw;
  double centering;
  double z;  // (raw - centering) / clt scale
  double l;  // (raw - centering) / lil scale; NaN below the loglog guard
};

struct StandardizedSeries {
  SeriesMode mode;
  std::string source_id;
  std::uint64_t seed = 0;
  std::vector<SeriesEntry> entries;
};

StandardizedSeries standardize_trace(const OccupancyTrace& trace,
                                     const WLaw& law, SeriesMode mode);

struct CheckReport {
  std::string name;
  std::vector<std::pair<std::string, double>> stats;
  std::vector<std::pair<std::string, double>> thresholds;
  bool pass = false;
  std::string provenance;
  double runtime_sec = 0.0;

  double stat(std::string_view key) const;  // throws if missing
};

// ---- pure checks over prepared series / traces ----

struct LilBandParams {
  int j_min = 5;
  double band_lo = 0.4, band_hi = 1.3;  // per-path max l lands here
  double band_frac = 0.90;
  double pooled_min = 0.8;  // pooled max over all paths at least this
  double cap = 1.5;         // |l| cap per checkpoint
  double cap_frac = 0.95;
  double eps = 0.5;  // band-violation epsilon reported alongside
};

CheckReport lil_trace(std::span<const StandardizedSeries> series,
                      const LilBandParams& params);

struct CoverageParams {
  int j_min = 5;
  double grid_step = 0.25;
  double delta = 0.15;
  double cover_min = 0.8;  // fraction of interior grid points per path
  double path_frac = 0.8;  // fraction of paths clearing cover_min
};

CheckReport limit_point_coverage(std::span<const StandardizedSeries> series,
                                 const CoverageParams& params);

struct ApproxParams {
  int j_min = 5;
};

// d_j = |K*_{n_j} - rho*(e^j)| / sqrt(j): medians must shrink and the
// median log-log slope must be negative.
CheckReport approx_check(std::span<const OccupancyTrace> traces,
                         const ApproxParams& params);

// ---- simulating checks ----

struct CltParams {
  int n_exp = 12;
  int replicates = 2000;
  double ks_bound = 0.05;
  int workers = 1;
  std::int64_t ball_budget = 100'000'000;
};

struct CltResult {
  CheckReport report;
  std::vector<std::int64_t> k_values;  // by replicate
  std::vector<double> z;
  double centering = 0.0;
  double scale = 0.0;
  std::int64_t n_balls = 0;
};

CltResult clt_check(const WLaw& law, std::uint64_t seed, const CltParams& params);

struct MomentParams {
  double y0 = 5.0;
  std::vector<double> gaps = {2.0, 4.0, 8.0, 16.0, 32.0};  // each > 1
  int replicates = 10000;
  double spread_max = 3.0;
  int workers = 1;
  bool log_domain = false;  // rho* mode: y0 and gaps live in log space
};

struct MomentResult {
  CheckReport report;
  std::vector<std::vector<std::int64_t>> increments;  // [replicate][gap]
  std::vector<double> ratios;                         // E inc^4 / gap^4
};

MomentResult moment_ratio(const WalkSource& source, std::uint64_t seed,
                          const MomentParams& params);

struct RenewalParams {
  int j_min = 3, j_max = 16;
  int paths = 50;
  double band_lo = 0.2, band_hi = 1.6;
  double band_frac = 0.7;
  double cap = 2.2;
  double cap_frac = 0.95;
  double sup_mean_lo = 0.5, sup_mean_hi = 1.2;
  int workers = 1;
};

struct RenewalPathResult {
  StandardizedSeries series;
  std::vector<double> sup_norm;  // sup statistic per checkpoint, same scale as l
};

struct RenewalResult {
  CheckReport report;
  std::vector<RenewalPathResult> paths;
};

// Band statistics of the standardized renewal counts (limit set [-1,1]).
RenewalResult renewal_lil(const WalkSource& source, std::uint64_t seed,
                          const RenewalParams& params);

// Running sup of |nu(y) - m^{-1} y|; the sup statistic dominates the
// endpoint statistic exactly, path by path.
RenewalResult sup_lil(const WalkSource& source, std::uint64_t seed,
                      const RenewalParams& params);

struct StrassenParams {
  int n_exp = 14;
  double grid_step = 0.01;
  double eps = 0.25;
  int paths = 2000;
  double viol_frac_max = 0.02;
  int workers = 1;
};

struct StrassenPathResult {
  std::vector<double> t;
  std::vector<std::int64_t> counts;
  std::vector<double> x;  // X_n(t)
  bool violated = false;
};

struct StrassenResult {
  CheckReport report;
  std::vector<StrassenPathResult> paths;
  double n = 0.0;
};

// |X_n(t)| <= sqrt(t) + eps across the grid (the envelope every limit
// function obeys).
StrassenResult strassen_envelope(const WalkSource& source, std::uint64_t seed,
                                 const StrassenParams& params);

}  // namespace sievelab
