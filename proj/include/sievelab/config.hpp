#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace sievelab {

// Flat, diffable key=value run description. Every field has a default;
// parse(emit(c)) round-trips losslessly. seed=0 means "derive from OS
// entropy and record the derived value in the output".
struct ExperimentConfig {
  std::string experiment = "clt";  // clt | lil | coverage | approx | moments |
                                   // renewal-lil | sup-lil | strassen | trace-dump
  std::string law = "uniform";
  std::uint64_t seed = 42;
  int replicates = 2000;  // clt / moments
  int paths = 100;        // trace-driven experiments
  int j_min = 5;
  int j_max = 18;
  int n_exp = 12;  // clt ball exponent; renewal/sup/strassen horizon exponent
  int workers = 0;  // 0: SIEVE_LAB_WORKERS env, else hardware concurrency
  std::int64_t ball_budget = 100000000;
  std::string out;  // CSV path; empty means "<experiment>.csv"

  // clt
  double ks_bound = 0.05;

  // lil band
  double band_lo = 0.4;
  double band_hi = 1.3;
  double band_frac = 0.90;
  double pooled_min = 0.8;
  double cap = 1.5;
  double cap_frac = 0.95;
  double eps = 0.5;

  // coverage
  double grid_step = 0.25;
  double delta = 0.15;
  double cover_min = 0.4;
  double path_frac = 0.55;

  // moments (rho-mode gaps are log-scale: x/y in {e^2, e^3, e^4})
  std::string gaps = "2,4,8,16,32";
  double y0 = 5;
  std::string rho_gaps = "2,3,4";
  double rho_y0 = 3;
  double spread_max = 3.0;

  // renewal / sup-lil
  int renewal_j_min = 3;
  double sup_mean_lo = 0.5;
  double sup_mean_hi = 1.2;
  double renewal_band_lo = 0.2;
  double renewal_band_hi = 1.6;
  double renewal_band_frac = 0.7;
  double renewal_cap = 2.2;

  // strassen
  double strassen_step = 0.01;
  double strassen_eps = 0.25;
  double strassen_viol_frac = 0.02;

  bool operator==(const ExperimentConfig&) const = default;

  std::string emit() const;
  static ExperimentConfig parse(std::istream& in, const char* origin = "<config>");
  static ExperimentConfig parse_file(const std::string& path);

  // Effective worker count: explicit > env > hardware.
  int effective_workers() const;
  std::string out_path() const;
};

}  // namespace sievelab
