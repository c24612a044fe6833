#include "ipg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ipg/problems.hpp"
#include "ipg/rates.hpp"

namespace ipg {

namespace {

using nlohmann::json;

void config_require(bool cond, const std::string& message) {
  if (!cond) throw ConfigError("config: " + message);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  config_require(obj.is_object(), where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    config_require(allowed.count(key) > 0, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: " + where + "." + key + " has the wrong type");
  }
}

template <typename T>
void read_opt(const json& obj, const std::string& key, const std::string& where, T& out) {
  if (obj.contains(key)) out = get_as<T>(obj, key, where);
}

std::vector<double> read_list(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  config_require(v.is_array(), where + "." + key + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& item : v) {
    config_require(item.is_number(), where + "." + key + " must be a list of numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string cell_stem(double q, double noise) { return "q" + format_number(q) + "_noise" + format_number(noise); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

double delta_effective(double noise, double degree, double radius) {
  return noise * std::pow(2.0 * radius, 1.0 - degree);
}

}  // namespace

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  config_require(version == 1, "unsupported version " + std::to_string(version));
  config_require(problem.family == "logsum", "problem.family must be 'logsum'");
  config_require(problem.n >= 1 && problem.num_terms >= 1, "problem dimensions must be positive");
  config_require(problem.radius > 0.0 && std::isfinite(problem.radius), "problem.radius must be positive");
  config_require(!problem.noise_level || *problem.noise_level >= 0.0, "problem.noise_level must be nonnegative");
  config_require(!oracle.noise.empty() && !oracle.degrees.empty(), "oracle.noise and oracle.degrees must be nonempty");
  for (double d : oracle.noise) config_require(d >= 0.0 && std::isfinite(d), "oracle.noise entries must be >= 0");
  if (oracle.family == OracleFamily::kExact) {
    for (double d : oracle.noise) config_require(d == 0.0, "the exact oracle has noise 0");
  }
  for (double q : oracle.degrees) {
    config_require(q >= 0.0 && q < 2.0, "oracle.degrees entries must lie in [0, 2)");
    config_require(oracle.family != OracleFamily::kNoisyGradient || q <= 1.0,
                   "the noisy-gradient ball reduction needs q <= 1");
  }
  config_require(solver.algorithm == "ipgm", "solver.algorithm must be 'ipgm'");
  config_require(solver.iterations >= 1, "solver.iterations must be positive");
  config_require(solver.step_scale > 0.0 && solver.step_scale <= 1.0, "solver.step_scale must lie in (0, 1]");
  config_require(!solver.rho || *solver.rho > 0.0, "solver.rho must be positive");
  config_require(solver.beta >= 0.0 && solver.beta < 1.0, "solver.beta must lie in [0, 1)");
  config_require(solver.zeta >= 0.0 && solver.zeta < 1.0, "solver.zeta must lie in [0, 1)");
  config_require(repeats >= 1, "repeats must be positive");
  config_require(plateau_fraction > 0.0 && plateau_fraction <= 1.0, "plateau_fraction must lie in (0, 1]");
  config_require(certify.pairs >= 1, "certify.pairs must be positive");
  config_require(certify.tolerance >= 0.0, "certify.tolerance must be nonnegative");
  config_require(certify.claimed_delta_scale >= 0.0, "certify.claimed_delta_scale must be nonnegative");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  check_keys(root, {"version", "seed", "repeats", "worst_case_directions", "plateau_fraction", "problem", "oracle",
                    "solver", "certify", "output"},
             "config");
  config_require(root.contains("version"), "missing 'version'");

  ExperimentConfig c;
  c.version = get_as<int>(root, "version", "config");
  read_opt(root, "seed", "config", c.seed);
  read_opt(root, "repeats", "config", c.repeats);
  read_opt(root, "worst_case_directions", "config", c.worst_case_directions);
  read_opt(root, "plateau_fraction", "config", c.plateau_fraction);

  if (root.contains("problem")) {
    const json& p = root.at("problem");
    check_keys(p, {"family", "n", "N", "radius", "seed", "noise_level"}, "problem");
    read_opt(p, "family", "problem", c.problem.family);
    read_opt(p, "n", "problem", c.problem.n);
    read_opt(p, "N", "problem", c.problem.num_terms);
    read_opt(p, "radius", "problem", c.problem.radius);
    read_opt(p, "seed", "problem", c.problem.seed);
    if (p.contains("noise_level") && !p.at("noise_level").is_null()) {
      c.problem.noise_level = get_as<double>(p, "noise_level", "problem");
    }
  }
  if (root.contains("oracle")) {
    const json& o = root.at("oracle");
    check_keys(o, {"family", "noise", "degrees"}, "oracle");
    if (o.contains("family")) {
      const auto family = get_as<std::string>(o, "family", "oracle");
      if (family == "noisy_gradient") {
        c.oracle.family = OracleFamily::kNoisyGradient;
      } else if (family == "exact") {
        c.oracle.family = OracleFamily::kExact;
        c.oracle.noise = {0.0};
      } else {
        throw ConfigError("config: oracle.family must be 'noisy_gradient' or 'exact'");
      }
    }
    if (o.contains("noise")) c.oracle.noise = read_list(o, "noise", "oracle");
    if (o.contains("degrees")) c.oracle.degrees = read_list(o, "degrees", "oracle");
  }
  if (root.contains("solver")) {
    const json& s = root.at("solver");
    check_keys(s, {"algorithm", "iterations", "step_scale", "rho", "beta", "zeta"}, "solver");
    read_opt(s, "algorithm", "solver", c.solver.algorithm);
    read_opt(s, "iterations", "solver", c.solver.iterations);
    read_opt(s, "step_scale", "solver", c.solver.step_scale);
    if (s.contains("rho") && !s.at("rho").is_null()) c.solver.rho = get_as<double>(s, "rho", "solver");
    read_opt(s, "beta", "solver", c.solver.beta);
    read_opt(s, "zeta", "solver", c.solver.zeta);
  }
  if (root.contains("certify")) {
    const json& s = root.at("certify");
    check_keys(s, {"pairs", "tolerance", "claimed_delta_scale"}, "certify");
    read_opt(s, "pairs", "certify", c.certify.pairs);
    read_opt(s, "tolerance", "certify", c.certify.tolerance);
    read_opt(s, "claimed_delta_scale", "certify", c.certify.claimed_delta_scale);
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    check_keys(o, {"directory"}, "output");
    if (o.contains("directory")) c.output_dir = get_as<std::string>(o, "directory", "output");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json root;
  root["version"] = c.version;
  root["seed"] = c.seed;
  root["repeats"] = c.repeats;
  root["worst_case_directions"] = c.worst_case_directions;
  root["plateau_fraction"] = c.plateau_fraction;
  root["problem"] = {{"family", c.problem.family},
                     {"n", c.problem.n},
                     {"N", c.problem.num_terms},
                     {"radius", c.problem.radius},
                     {"seed", c.problem.seed},
                     {"noise_level", c.problem.noise_level ? json(*c.problem.noise_level) : json(nullptr)}};
  root["oracle"] = {{"family", c.oracle.family == OracleFamily::kExact ? "exact" : "noisy_gradient"},
                    {"noise", c.oracle.noise},
                    {"degrees", c.oracle.degrees}};
  root["solver"] = {{"algorithm", c.solver.algorithm},
                    {"iterations", c.solver.iterations},
                    {"step_scale", c.solver.step_scale},
                    {"rho", c.solver.rho ? json(*c.solver.rho) : json(nullptr)},
                    {"beta", c.solver.beta},
                    {"zeta", c.solver.zeta}};
  root["certify"] = {{"pairs", c.certify.pairs},
                     {"tolerance", c.certify.tolerance},
                     {"claimed_delta_scale", c.certify.claimed_delta_scale}};
  root["output"] = {{"directory", c.output_dir.string()}};
  return root.dump(2) + "\n";
}

ExperimentConfig fig1_preset(std::uint64_t seed) {
  ExperimentConfig c;
  c.seed = seed;
  c.repeats = 5;
  c.output_dir = "fig1";
  return c;
}

std::uint64_t cell_seed(std::uint64_t master, double degree, double noise, std::size_t repeat) {
  const std::uint64_t keyed = derive_seed(master, std::bit_cast<std::uint64_t>(degree), std::bit_cast<std::uint64_t>(noise));
  return derive_seed(keyed, repeat);
}

double plateau_estimate(const RunTrace& trace, double fraction) {
  require(trace.size() > 0, "plateau_estimate: empty trace");
  require(fraction > 0.0 && fraction <= 1.0, "plateau_estimate: fraction must lie in (0, 1]");
  const std::size_t n = trace.size();
  const std::size_t window = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * n)));
  double sum = 0.0;
  for (std::size_t i = n - window; i < n; ++i) sum += trace.records[i].min_gm_sq;
  return sum / static_cast<double>(window);
}

bool ExperimentResult::any_diverged() const {
  return std::any_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.diverged; });
}

bool CertifyResult::all_certified() const {
  return std::all_of(cells.begin(), cells.end(), [](const CertifyCell& c) { return c.report.certified; });
}

std::size_t default_workers() {
  if (const char* env = std::getenv("IPGM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct Grid {
  std::shared_ptr<const LogSumProblem> problem;
  Vector x0;
  double gap = 0.0;
};

Grid build_grid(const ExperimentConfig& config) {
  Grid g;
  g.problem = std::make_shared<const LogSumProblem>(generate_logsum_instance(
      config.problem.n, config.problem.num_terms, config.problem.radius, config.problem.noise_level,
      config.problem.seed));
  g.x0 = Vector::Zero(config.problem.n);
  g.gap = g.problem->value(g.x0) - g.problem->lower_bound();
  return g;
}

std::unique_ptr<FirstOrderOracle> make_oracle(const ExperimentConfig& config, const Grid& grid, double q) {
  if (config.oracle.family == OracleFamily::kExact) {
    return std::make_unique<ExactOracle>(grid.problem, grid.problem->lipschitz(), q);
  }
  return std::make_unique<NoisyGradientOracle>(grid.problem, q, config.problem.radius);
}

// The bound the cell is compared against: the constant-schedule curve when
// rho = L and beta = zeta = 0, the general decaying-schedule curve otherwise.
BoundCurve cell_bound(const ExperimentConfig& config, double lipschitz, double gap, double q, double delta,
                      double rho) {
  std::vector<double> ks(config.solver.iterations);
  for (std::size_t k = 0; k < ks.size(); ++k) ks[k] = static_cast<double>(k);
  if (delta == 0.0) {
    // No majorization: the q rho term is absent from the step, so q = 0 here.
    return sample_curve(CurveKind::kThm2Nonconvex,
                        {{"L", lipschitz}, {"rho", 1.0}, {"q", 0.0}, {"delta", 0.0}, {"beta", config.solver.beta},
                         {"zeta", config.solver.zeta}, {"gap", gap}},
                        ks);
  }
  if (rho == lipschitz && config.solver.beta == 0.0 && config.solver.zeta == 0.0) {
    return sample_curve(CurveKind::kCor1Const, {{"L", lipschitz}, {"q", q}, {"delta", delta}, {"gap", gap}}, ks);
  }
  return sample_curve(CurveKind::kThm2Nonconvex,
                      {{"L", lipschitz}, {"rho", rho}, {"q", q}, {"delta", delta}, {"beta", config.solver.beta},
                       {"zeta", config.solver.zeta}, {"gap", gap}},
                      ks);
}

template <typename Task>
void run_parallel(std::size_t count, std::size_t workers, Task task) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, count));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const ExecutionOptions& options) {
  config.validate();
  const Grid grid = build_grid(config);
  const double lipschitz = grid.problem->lipschitz();

  ExperimentResult result;
  result.lipschitz = lipschitz;
  result.initial_gap = grid.gap;
  for (double q : config.oracle.degrees) {
    for (double noise : config.oracle.noise) {
      for (std::size_t r = 0; r < config.repeats; ++r) {
        CellResult cell;
        cell.degree = q;
        cell.noise = noise;
        cell.delta_eff = delta_effective(noise, q, config.problem.radius);
        cell.repeat = r;
        cell.seed = cell_seed(config.seed, q, noise, r);
        result.cells.push_back(cell);
      }
    }
  }

  const auto out = config.output_dir;
  if (options.write_files) {
    std::filesystem::create_directories(out / "cells");
    std::filesystem::create_directories(out / "bounds");
    write_file(out / "config.json", config_to_json(config));
  }

  run_parallel(result.cells.size(), options.workers.value_or(default_workers()), [&](std::size_t i) {
    CellResult& cell = result.cells[i];
    const auto oracle = make_oracle(config, grid, cell.degree);
    const double rho = cell.delta_eff == 0.0 ? 0.0 : config.solver.rho.value_or(lipschitz);

    ScheduleConfig schedule;
    schedule.lipschitz = lipschitz;
    schedule.rho = rho;
    schedule.degree = cell.degree;
    schedule.delta0 = cell.delta_eff;
    schedule.beta = config.solver.beta;
    schedule.zeta = config.solver.zeta;
    schedule.max_iters = config.solver.iterations;
    schedule.step_scale = config.solver.step_scale;

    RunOptions run;
    run.seed = cell.seed;
    run.worst_case_directions = config.worst_case_directions;
    run.store_iterates = false;

    const BoundCurve curve = cell_bound(config, lipschitz, grid.gap, cell.degree, cell.delta_eff, rho);
    const std::string stem = cell_stem(cell.degree, cell.noise);
    if (options.write_files && cell.repeat == 0) {
      std::ostringstream csv;
      write_curve_csv(csv, curve);
      write_file(out / "bounds" / (stem + ".csv"), csv.str());
    }

    RunTrace trace;
    try {
      trace = ipgm_run(*grid.problem, *oracle, grid.problem->constraint(), schedule, grid.x0, run);
    } catch (const DivergenceError& e) {
      cell.diverged = true;
      cell.error = e.what();
      return;
    }

    std::vector<double> bound(trace.size());
    cell.dominated = true;
    for (std::size_t k = 0; k < trace.size(); ++k) {
      bound[k] = curve.samples[k].second;
      if (trace.records[k].min_gm_sq > bound[k]) cell.dominated = false;
    }
    cell.final_min_gm_sq = trace.records.back().min_gm_sq;
    cell.plateau = plateau_estimate(trace, config.plateau_fraction);
    cell.bound_plateau = bound.back();
    if (options.write_files) {
      cell.trace_file = std::filesystem::path("cells") / (stem + "_rep" + std::to_string(cell.repeat) + ".csv");
      std::ostringstream csv;
      write_trace_csv(csv, trace, &bound);
      write_file(out / cell.trace_file, csv.str());
    }
    if (options.keep_traces) {
      cell.trace = std::move(trace);
      cell.bound = std::move(bound);
    }
  });

  if (options.write_files) {
    std::ostringstream summary;
    summary.precision(17);
    summary << "q,noise,delta_eff,repeat,seed,status,adversarial,final_min_gm_sq,plateau,bound_plateau,dominated,"
               "trace_file\n";
    for (const auto& c : result.cells) {
      summary << c.degree << ',' << c.noise << ',' << c.delta_eff << ',' << c.repeat << ',' << c.seed << ','
              << (c.diverged ? "diverged" : "ok") << ',' << (config.worst_case_directions > 1 ? 1 : 0) << ',';
      if (c.diverged) {
        summary << ",,,0,\n";
      } else {
        summary << c.final_min_gm_sq << ',' << c.plateau << ',' << c.bound_plateau << ',' << (c.dominated ? 1 : 0)
                << ',' << c.trace_file.generic_string() << '\n';
      }
    }
    write_file(out / "summary.csv", summary.str());
  }
  return result;
}

CertifyResult certify_grid(const ExperimentConfig& config, bool write_files) {
  config.validate();
  const Grid grid = build_grid(config);
  const double radius = config.problem.radius;
  const auto sampler = l1_ball_pair_sampler(config.problem.n, radius);
  const ValueFunction exact = [&](const Vector& x) { return grid.problem->value(x); };

  CertifyResult result;
  for (double q : config.oracle.degrees) {
    const auto oracle = make_oracle(config, grid, q);
    for (double noise : config.oracle.noise) {
      const double delta = delta_effective(noise, q, radius);
      const double scale = config.certify.claimed_delta_scale;
      const OracleQuery query = [&](const Vector& y, Rng& rng) {
        OracleEval eval = oracle->query(y, delta, rng);
        eval.certificate.delta *= scale;
        return eval;
      };
      CertifyCell cell;
      cell.degree = q;
      cell.noise = noise;
      cell.claimed_delta = delta * scale;
      cell.report = certify_oracle(query, exact, sampler, config.certify.pairs, config.certify.tolerance,
                                   cell_seed(config.seed, q, noise, 0));
      result.cells.push_back(std::move(cell));
    }
  }

  if (write_files) {
    std::filesystem::create_directories(config.output_dir);
    std::ostringstream csv, violations;
    csv.precision(17);
    violations.precision(17);
    csv << "q,noise,claimed_delta,lipschitz,pairs,max_violation,certified\n";
    for (const auto& c : result.cells) {
      csv << c.degree << ',' << c.noise << ',' << c.claimed_delta << ',' << grid.problem->lipschitz() << ','
          << c.report.pairs << ',' << c.report.max_violation << ',' << (c.report.certified ? 1 : 0) << '\n';
      if (c.report.violating_pair) {
        const Eigen::IOFormat row(Eigen::FullPrecision, Eigen::DontAlignCols, " ", " ");
        violations << "q=" << c.degree << " noise=" << c.noise << " claimed_delta=" << c.claimed_delta
                   << " max_violation=" << c.report.max_violation << '\n'
                   << "x " << c.report.violating_pair->x.transpose().format(row) << '\n'
                   << "y " << c.report.violating_pair->y.transpose().format(row) << '\n';
      }
    }
    write_file(config.output_dir / "certify.csv", csv.str());
    if (!result.all_certified()) write_file(config.output_dir / "violations.txt", violations.str());
  }
  return result;
}

}  // namespace ipg
