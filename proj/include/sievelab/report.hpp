#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sievelab/verify.hpp"

namespace sievelab {

// One flat CSV record per (replicate, checkpoint). The aux columns carry
// per-experiment extras (documented in the README); the header is stable.
struct ReportRow {
  std::string experiment;
  std::string law;
  std::uint64_t seed = 0;
  std::int64_t replicate = 0;
  double checkpoint = 0.0;
  double n = 0.0;
  double raw = 0.0;
  double centering = 0.0;
  double z = 0.0;
  double l = 0.0;
  double aux_a = 0.0;
  double aux_b = 0.0;
  double aux_c = 0.0;
  int flag = 1;
};

inline constexpr const char* kCsvHeader =
    "experiment,law,seed,replicate,checkpoint,n,raw,centering,z,l,aux_a,aux_b,aux_c,flag";

// UTF-8, comma-separated, doubles at 17 significant digits; rows are written
// in the order given (callers keep them sorted by replicate, checkpoint).
std::string to_csv(std::span<const ReportRow> rows);
void write_csv_file(const std::string& path, std::span<const ReportRow> rows);

void print_report(std::ostream& os, const CheckReport& report);

}  // namespace sievelab
