#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipg/oracle.hpp"
#include "ipg/solver.hpp"

namespace ipg {

/// Raised for malformed or out-of-range experiment configurations.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class OracleFamily { kNoisyGradient, kExact };

struct ProblemSpec {
  std::string family = "logsum";
  long n = 64;
  long num_terms = 128;
  double radius = 4.0;
  std::uint64_t seed = 0;
  std::optional<double> noise_level;
};

struct OracleSpec {
  OracleFamily family = OracleFamily::kNoisyGradient;
  std::vector<double> noise{0.1, 1.0, 3.0};  // Delta, the gradient-error bound
  std::vector<double> degrees{0.0, 0.5, 1.0};
};

struct SolverSpec {
  std::string algorithm = "ipgm";
  std::size_t iterations = 5000;
  double step_scale = 0.5;
  std::optional<double> rho;  // default: L_F
  double beta = 0.0;
  double zeta = 0.0;
};

struct CertifySpec {
  std::size_t pairs = 1000;
  double tolerance = 1e-7;
  /// Claimed delta = scale * actual delta; < 1 understates the inexactness.
  double claimed_delta_scale = 1.0;
};

struct ExperimentConfig {
  int version = 1;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::size_t worst_case_directions = 0;
  double plateau_fraction = 0.1;
  ProblemSpec problem;
  OracleSpec oracle;
  SolverSpec solver;
  CertifySpec certify;
  std::filesystem::path output_dir = "results";

  void validate() const;
};

/// Parses a JSON document; unknown keys and a missing or wrong `version`
/// are errors.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

/// Canonical instance, q in {0, 1/2, 1}, Delta in {0.1, 1, 3}, 5000
/// iterations, 5 repeats.
ExperimentConfig fig1_preset(std::uint64_t seed);

/// Keyed on the values of (q, Delta) and the repeat index, not on grid
/// positions.
std::uint64_t cell_seed(std::uint64_t master, double degree, double noise, std::size_t repeat);

/// Mean of min_gm_sq over the final `fraction` of the iterations.
double plateau_estimate(const RunTrace& trace, double fraction = 0.1);

struct CellResult {
  double degree = 0.0;
  double noise = 0.0;
  double delta_eff = 0.0;  // Delta (2R)^{1-q}
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string error;
  double final_min_gm_sq = 0.0;
  double plateau = 0.0;
  double bound_plateau = 0.0;
  bool dominated = false;
  std::filesystem::path trace_file;
  std::optional<RunTrace> trace;  // kept on request
  std::vector<double> bound;      // bound_cor1_const per k, kept with the trace
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  double lipschitz = 0.0;
  double initial_gap = 0.0;  // f(x0) - f_inf
  bool any_diverged() const;
};

struct ExecutionOptions {
  bool write_files = true;
  bool keep_traces = false;
  /// Defaults to IPGM_WORKERS, else the hardware concurrency.
  std::optional<std::size_t> workers;
};

std::size_t default_workers();

/// Runs every (q, Delta, repeat) cell. A diverged cell is recorded and does
/// not stop the sweep. Files: cells/*.csv, bounds/*.csv, summary.csv.
ExperimentResult run_experiment(const ExperimentConfig& config, const ExecutionOptions& options = {});

struct CertifyCell {
  double degree = 0.0;
  double noise = 0.0;
  double claimed_delta = 0.0;
  CertificationReport report;
};

struct CertifyResult {
  std::vector<CertifyCell> cells;
  bool all_certified() const;
};

/// Certifies the oracle of every (q, Delta) cell over pairs in the l1-ball.
/// Writes certify.csv (and violations.txt on refutation) when requested.
CertifyResult certify_grid(const ExperimentConfig& config, bool write_files = true);

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRefuted = 2, kExitDiverged = 3 };

}  // namespace ipg
