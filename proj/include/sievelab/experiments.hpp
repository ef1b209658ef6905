#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sievelab/config.hpp"
#include "sievelab/occupancy.hpp"
#include "sievelab/report.hpp"
#include "sievelab/verify.hpp"

namespace sievelab {

struct ExperimentOutput {
  std::vector<ReportRow> rows;
  std::vector<CheckReport> checks;
  std::uint64_t resolved_seed = 0;

  bool all_pass() const;
};

// Executes the experiment named by the config; pure of file I/O.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Full CLI path: run, write the CSV, print the summary. Returns the process
// exit status (0 iff every check passed).
int run_and_write(const ExperimentConfig& cfg, std::ostream& summary);

// Shared building blocks (the acceptance suite reuses the lil traces for
// several criteria instead of re-simulating).
std::vector<OccupancyTrace> simulate_traces(const WLaw& law, std::uint64_t seed,
                                            int paths, int j_max,
                                            std::int64_t ball_budget, int workers);

std::vector<double> parse_gap_list(const std::string& csv);

std::uint64_t resolve_seed(std::uint64_t configured);

}  // namespace sievelab
