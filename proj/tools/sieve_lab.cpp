// sieve_lab: experiment runner for Bernoulli-sieve occupancy and perturbed
// random-walk limit checks. One subcommand per experiment; flags override a
// key=value config file; every run is reproducible from its seed.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sievelab/config.hpp"
#include "sievelab/experiments.hpp"

namespace {

struct SubcommandSpec {
  const char* name;
  const char* help;
  sievelab::ExperimentConfig defaults;
};

sievelab::ExperimentConfig with_defaults(const char* experiment) {
  sievelab::ExperimentConfig cfg;
  cfg.experiment = experiment;
  std::string name = experiment;
  if (name == "clt") {
    cfg.n_exp = 12;
    cfg.replicates = 2000;
  } else if (name == "lil" || name == "coverage" || name == "approx" ||
             name == "trace-dump") {
    cfg.j_max = 18;
    cfg.paths = 100;
  } else if (name == "moments") {
    cfg.replicates = 10000;
  } else if (name == "renewal-lil" || name == "sup-lil") {
    cfg.law = "exp:1.0";
    cfg.n_exp = 16;
    cfg.paths = 50;
  } else if (name == "strassen") {
    cfg.law = "exp:1.0";
    cfg.n_exp = 14;
    cfg.paths = 2000;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bernoulli sieve / perturbed random walk simulation lab"};
  app.require_subcommand(1);

  const SubcommandSpec specs[] = {
      {"clt", "KS check of the standardized occupied-box count", {}},
      {"lil", "iterated-logarithm band statistics for K* trajectories", {}},
      {"coverage", "limit-point coverage of [-1,1] by standardized paths", {}},
      {"approx", "a.s. approximation of K* by the large-box count", {}},
      {"moments", "fourth-moment increment ratios for N and rho*", {}},
      {"renewal-lil", "iterated-logarithm band for the renewal count", {}},
      {"sup-lil", "running-sup statistic of the centered renewal count", {}},
      {"strassen", "sqrt(t) envelope check for rescaled renewal paths", {}},
      {"trace-dump", "raw occupancy trace rows, no checks", {}},
  };

  int exit_status = 2;
  for (const auto& spec : specs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    auto cfg = std::make_shared<sievelab::ExperimentConfig>(with_defaults(spec.name));
    auto config_path = std::make_shared<std::string>();

    sub->add_option("--config", *config_path, "key=value config file");
    // Flag defaults mirror the per-experiment config defaults; explicit
    // flags override whatever the config file set.
    sub->add_option("--law", cfg->law, "W-law or walk source spec");
    sub->add_option("--seed", cfg->seed, "master seed (0: derive from OS entropy)");
    sub->add_option("--replicates", cfg->replicates, "replicate count");
    sub->add_option("--paths", cfg->paths, "path count");
    sub->add_option("--j-min", cfg->j_min, "first checkpoint used in statistics");
    sub->add_option("--j-max", cfg->j_max, "last checkpoint [e^j]");
    sub->add_option("--n-exp", cfg->n_exp, "ball/horizon exponent (n = [e^x])");
    sub->add_option("--workers", cfg->workers,
                    "worker threads (0: SIEVE_LAB_WORKERS or hardware)");
    sub->add_option("--out", cfg->out, "CSV output path");
    sub->add_option("--ball-budget", cfg->ball_budget, "max balls per path");
    sub->add_option("--ks-bound", cfg->ks_bound, "KS pass threshold");
    sub->add_option("--eps", cfg->eps, "band-violation epsilon");
    sub->add_option("--band-lo", cfg->band_lo, "per-path max lower edge");
    sub->add_option("--band-hi", cfg->band_hi, "per-path max upper edge");
    sub->add_option("--grid-step", cfg->grid_step, "coverage grid step");
    sub->add_option("--delta", cfg->delta, "coverage visit half-width");
    sub->add_option("--gaps", cfg->gaps, "moment gaps x-y (comma list)");
    sub->add_option("--y0", cfg->y0, "moment base point y");
    sub->add_option("--strassen-step", cfg->strassen_step, "envelope grid step");
    sub->add_option("--strassen-eps", cfg->strassen_eps, "envelope slack");

    sub->callback([&exit_status, sub, cfg, config_path, spec] {
      sievelab::ExperimentConfig merged = *cfg;
      if (!config_path->empty()) {
        merged = sievelab::ExperimentConfig::parse_file(*config_path);
        merged.experiment = spec.name;
        // re-apply flags given on the command line
        auto reapply = [&](const char* flag, auto member) {
          if (sub->count(flag)) merged.*member = (*cfg).*member;
        };
        reapply("--law", &sievelab::ExperimentConfig::law);
        reapply("--seed", &sievelab::ExperimentConfig::seed);
        reapply("--replicates", &sievelab::ExperimentConfig::replicates);
        reapply("--paths", &sievelab::ExperimentConfig::paths);
        reapply("--j-min", &sievelab::ExperimentConfig::j_min);
        reapply("--j-max", &sievelab::ExperimentConfig::j_max);
        reapply("--n-exp", &sievelab::ExperimentConfig::n_exp);
        reapply("--workers", &sievelab::ExperimentConfig::workers);
        reapply("--out", &sievelab::ExperimentConfig::out);
        reapply("--ball-budget", &sievelab::ExperimentConfig::ball_budget);
        reapply("--ks-bound", &sievelab::ExperimentConfig::ks_bound);
        reapply("--eps", &sievelab::ExperimentConfig::eps);
        reapply("--band-lo", &sievelab::ExperimentConfig::band_lo);
        reapply("--band-hi", &sievelab::ExperimentConfig::band_hi);
        reapply("--grid-step", &sievelab::ExperimentConfig::grid_step);
        reapply("--delta", &sievelab::ExperimentConfig::delta);
        reapply("--gaps", &sievelab::ExperimentConfig::gaps);
        reapply("--y0", &sievelab::ExperimentConfig::y0);
        reapply("--strassen-step", &sievelab::ExperimentConfig::strassen_step);
        reapply("--strassen-eps", &sievelab::ExperimentConfig::strassen_eps);
      }
      exit_status = sievelab::run_and_write(merged, std::cout);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return exit_status;
}
