// Command-line driver for the inexact proximal gradient experiments.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ipg/harness.hpp"
#include "ipg/rates.hpp"

namespace {

using namespace ipg;

int report_experiment(const ExperimentResult& result, const ExperimentConfig& config) {
  std::size_t dominated = 0, diverged = 0;
  for (const auto& c : result.cells) {
    if (c.diverged) {
      ++diverged;
      std::cerr << "cell q=" << c.degree << " noise=" << c.noise << " repeat=" << c.repeat << " diverged: " << c.error
                << '\n';
    } else if (c.dominated) {
      ++dominated;
    }
  }
  std::cout << result.cells.size() << " cells, " << dominated << " dominated by their bound, " << diverged
            << " diverged; results in " << config.output_dir.string() << '\n';
  return diverged > 0 ? kExitDiverged : kExitOk;
}

std::vector<double> k_grid(const std::vector<double>& explicit_ks, double k_min, double k_max, std::size_t points,
                           bool log_spaced) {
  if (!explicit_ks.empty()) return explicit_ks;
  require(points >= 1, "rates: --points must be positive");
  require(k_max >= k_min && k_min >= 0.0, "rates: need 0 <= k-min <= k-max");
  require(!log_spaced || k_min > 0.0, "rates: log spacing needs k-min > 0");
  std::vector<double> ks(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    ks[i] = log_spaced ? k_min * std::pow(k_max / k_min, t) : k_min + t * (k_max - k_min);
  }
  return ks;
}

CurveParams parse_params(const std::vector<std::string>& items) {
  CurveParams params;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("rates: parameters take the form name=value");
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) throw ConfigError("rates: '" + value + "' is not a number");
    params[item.substr(0, eq)] = v;
  }
  return params;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inexact proximal gradient experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run = app.add_subcommand("run", "Run an experiment grid from a JSON config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");

  std::size_t directions = 0;
  auto* worst = app.add_subcommand("worst-case", "Run with the worst of m random oracle answers per iteration");
  worst->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  worst->add_option("--out", out_dir, "Output directory (overrides the config)");
  worst->add_option("--directions", directions, "Candidates per iteration (default: config value, else 100)");

  double claimed_scale = -1.0;
  auto* certify = app.add_subcommand("certify", "Empirically certify the configured oracles");
  certify->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  certify->add_option("--out", out_dir, "Output directory (overrides the config)");
  certify->add_option("--claimed-delta-scale", claimed_scale, "Multiply the claimed delta (refutation runs)");

  std::string kind_name, rates_out;
  std::vector<std::string> param_items;
  std::vector<double> explicit_ks;
  double k_min = 1.0, k_max = 1e5;
  std::size_t points = 50;
  bool log_spaced = false;
  auto* rates = app.add_subcommand("rates", "Export a theoretical bound curve as CSV");
  rates->add_option("--kind", kind_name, "Curve kind, e.g. cor1_const, fipgm_opt_rho")->required();
  rates->add_option("--param", param_items, "name=value (L, rho, q, delta, gap, R, beta, zeta, H, nu)");
  rates->add_option("--k", explicit_ks, "Explicit k values")->delimiter(',');
  rates->add_option("--k-min", k_min, "Smallest k");
  rates->add_option("--k-max", k_max, "Largest k");
  rates->add_option("--points", points, "Number of samples");
  rates->add_flag("--log", log_spaced, "Log-spaced k grid");
  rates->add_option("--out", rates_out, "Output CSV (default: stdout)");

  std::uint64_t seed = 0;
  std::size_t iterations = 0, repeats = 0, fig_directions = 0;
  auto* fig1 = app.add_subcommand("reproduce-fig1", "Canonical instance, q in {0, 1/2, 1}, Delta in {0.1, 1, 3}");
  fig1->add_option("--seed", seed, "Master seed");
  fig1->add_option("--out", out_dir, "Output directory (default: fig1)");
  fig1->add_option("--iterations", iterations, "Override the 5000 iterations");
  fig1->add_option("--repeats", repeats, "Override the 5 repeats");
  fig1->add_option("--worst-case-directions", fig_directions, "Worst-of-m oracle answers (0: random)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (run->parsed() || worst->parsed()) {
      ExperimentConfig config = load_config(config_path);
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (worst->parsed()) {
        if (directions > 0) config.worst_case_directions = directions;
        if (config.worst_case_directions == 0) config.worst_case_directions = 100;
      }
      return report_experiment(run_experiment(config), config);
    }
    if (certify->parsed()) {
      ExperimentConfig config = load_config(config_path);
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (claimed_scale >= 0.0) config.certify.claimed_delta_scale = claimed_scale;
      const CertifyResult result = certify_grid(config);
      for (const auto& c : result.cells) {
        std::cout << "q=" << c.degree << " noise=" << c.noise << " claimed_delta=" << c.claimed_delta
                  << " max_violation=" << c.report.max_violation
                  << (c.report.certified ? " certified" : " REFUTED") << '\n';
        if (c.report.violating_pair) {
          std::cerr << "violating pair for q=" << c.degree << " noise=" << c.noise << " logged in "
                    << (config.output_dir / "violations.txt").string() << '\n';
        }
      }
      return result.all_certified() ? kExitOk : kExitRefuted;
    }
    if (rates->parsed()) {
      const auto kind = parse_curve_kind(kind_name);
      if (!kind) throw ConfigError("rates: unknown curve kind '" + kind_name + "'");
      const BoundCurve curve =
          sample_curve(*kind, parse_params(param_items), k_grid(explicit_ks, k_min, k_max, points, log_spaced));
      if (rates_out.empty()) {
        write_curve_csv(std::cout, curve);
      } else {
        std::ofstream file(rates_out);
        if (!file) throw ConfigError("rates: cannot write " + rates_out);
        write_curve_csv(file, curve);
      }
      return kExitOk;
    }
    if (fig1->parsed()) {
      ExperimentConfig config = fig1_preset(seed);
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (iterations > 0) config.solver.iterations = iterations;
      if (repeats > 0) config.repeats = repeats;
      config.worst_case_directions = fig_directions;
      return report_experiment(run_experiment(config), config);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
