#include "sievelab/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace sievelab {
namespace {

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string to_csv(std::span<const ReportRow> rows) {
  std::string out = kCsvHeader;
  out += "\n";
  for (const auto& r : rows) {
    out += r.experiment;
    out += ",";
    out += r.law;
    out += ",";
    out += std::to_string(r.seed);
    out += ",";
    out += std::to_string(r.replicate);
    for (double v : {r.checkpoint, r.n, r.raw, r.centering, r.z, r.l, r.aux_a,
                     r.aux_b, r.aux_c}) {
      out += ",";
      append_double(out, v);
    }
    out += ",";
    out += std::to_string(r.flag);
    out += "\n";
  }
  return out;
}

void write_csv_file(const std::string& path, std::span<const ReportRow> rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + path);
  f << to_csv(rows);
  if (!f) throw std::runtime_error("failed writing " + path);
}

void print_report(std::ostream& os, const CheckReport& report) {
  os << "[" << report.name << "] " << (report.pass ? "PASS" : "FAIL");
  for (const auto& [k, v] : report.stats) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    os << "  " << k << "=" << buf;
  }
  os << "\n    thresholds:";
  for (const auto& [k, v] : report.thresholds) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    os << " " << k << "=" << buf;
  }
  char rt[40];
  std::snprintf(rt, sizeof rt, "%.2fs", report.runtime_sec);
  os << "  (" << rt << "; " << report.provenance << ")\n";
}

}  // namespace sievelab
