#include "sievelab/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

namespace sievelab {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <class T>
void parse_into(T& dst, const std::string& v);

template <>
void parse_into<std::string>(std::string& dst, const std::string& v) {
  dst = v;
}

template <>
void parse_into<double>(double& dst, const std::string& v) {
  std::size_t used = 0;
  dst = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("trailing junk");
}

template <>
void parse_into<int>(int& dst, const std::string& v) {
  std::size_t used = 0;
  dst = std::stoi(v, &used);
  if (used != v.size()) throw std::invalid_argument("trailing junk");
}

template <>
void parse_into<std::int64_t>(std::int64_t& dst, const std::string& v) {
  std::size_t used = 0;
  dst = std::stoll(v, &used);
  if (used != v.size()) throw std::invalid_argument("trailing junk");
}

template <>
void parse_into<std::uint64_t>(std::uint64_t& dst, const std::string& v) {
  std::size_t used = 0;
  dst = std::stoull(v, &used);
  if (used != v.size()) throw std::invalid_argument("trailing junk");
}

template <class T>
Field field(T ExperimentConfig::* member) {
  return {
      [member](const ExperimentConfig& c) -> std::string {
        if constexpr (std::is_same_v<T, std::string>) {
          return c.*member;
        } else if constexpr (std::is_same_v<T, double>) {
          return fmt_double(c.*member);
        } else {
          return std::to_string(c.*member);
        }
      },
      [member](ExperimentConfig& c, const std::string& v) {
        parse_into(c.*member, v);
      },
  };
}

// Single source of truth for the file format: emit order and key names.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"experiment", field(&ExperimentConfig::experiment)},
      {"law", field(&ExperimentConfig::law)},
      {"seed", field(&ExperimentConfig::seed)},
      {"replicates", field(&ExperimentConfig::replicates)},
      {"paths", field(&ExperimentConfig::paths)},
      {"j_min", field(&ExperimentConfig::j_min)},
      {"j_max", field(&ExperimentConfig::j_max)},
      {"n_exp", field(&ExperimentConfig::n_exp)},
      {"workers", field(&ExperimentConfig::workers)},
      {"ball_budget", field(&ExperimentConfig::ball_budget)},
      {"out", field(&ExperimentConfig::out)},
      {"ks_bound", field(&ExperimentConfig::ks_bound)},
      {"band_lo", field(&ExperimentConfig::band_lo)},
      {"band_hi", field(&ExperimentConfig::band_hi)},
      {"band_frac", field(&ExperimentConfig::band_frac)},
      {"pooled_min", field(&ExperimentConfig::pooled_min)},
      {"cap", field(&ExperimentConfig::cap)},
      {"cap_frac", field(&ExperimentConfig::cap_frac)},
      {"eps", field(&ExperimentConfig::eps)},
      {"grid_step", field(&ExperimentConfig::grid_step)},
      {"delta", field(&ExperimentConfig::delta)},
      {"cover_min", field(&ExperimentConfig::cover_min)},
      {"path_frac", field(&ExperimentConfig::path_frac)},
      {"gaps", field(&ExperimentConfig::gaps)},
      {"y0", field(&ExperimentConfig::y0)},
      {"rho_gaps", field(&ExperimentConfig::rho_gaps)},
      {"rho_y0", field(&ExperimentConfig::rho_y0)},
      {"spread_max", field(&ExperimentConfig::spread_max)},
      {"renewal_j_min", field(&ExperimentConfig::renewal_j_min)},
      {"sup_mean_lo", field(&ExperimentConfig::sup_mean_lo)},
      {"sup_mean_hi", field(&ExperimentConfig::sup_mean_hi)},
      {"renewal_band_lo", field(&ExperimentConfig::renewal_band_lo)},
      {"renewal_band_hi", field(&ExperimentConfig::renewal_band_hi)},
      {"renewal_band_frac", field(&ExperimentConfig::renewal_band_frac)},
      {"renewal_cap", field(&ExperimentConfig::renewal_cap)},
      {"strassen_step", field(&ExperimentConfig::strassen_step)},
      {"strassen_eps", field(&ExperimentConfig::strassen_eps)},
      {"strassen_viol_frac", field(&ExperimentConfig::strassen_viol_frac)},
  };
  return f;
}

}  // namespace

std::string ExperimentConfig::emit() const {
  std::string out;
  for (const auto& [key, f] : fields()) {
    out += key;
    out += "=";
    out += f.get(*this);
    out += "\n";
  }
  return out;
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const char* origin) {
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument(std::string(origin) + ":" +
                                  std::to_string(line_no) + ": " + why);
    };
    if (eq == std::string::npos) fail("expected key=value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    bool found = false;
    for (const auto& [name, f] : fields()) {
      if (name == key) {
        try {
          f.set(cfg, value);
        } catch (const std::exception&) {
          fail("bad value '" + value + "' for key '" + key + "'");
        }
        found = true;
        break;
      }
    }
    if (!found) fail("unknown key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse(in, path.c_str());
}

int ExperimentConfig::effective_workers() const {
  if (workers > 0) return workers;
  if (const char* env = std::getenv("SIEVE_LAB_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string ExperimentConfig::out_path() const {
  return out.empty() ? experiment + ".csv" : out;
}

}  // namespace sievelab
