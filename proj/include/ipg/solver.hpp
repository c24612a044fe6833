#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ipg/objective.hpp"
#include "ipg/oracle.hpp"
#include "ipg/prox.hpp"

namespace ipg {

struct ScheduleConfig {
  double lipschitz = 1.0;  // L
  double rho = 1.0;        // may be 0 when delta0 = 0
  double degree = 0.0;     // q
  double delta0 = 0.0;
  double beta = 0.0;
  double zeta = 0.0;
  std::size_t max_iters = 100;
  /// Multiplies the nominal step; 1/2 gives alpha = 1/(2(L + q rho)).
  double step_scale = 1.0;
  /// Take L_k from each oracle answer instead of `lipschitz` (Hoelder
  /// oracles re-derive L(delta_k) per query). I-PGM only.
  bool lipschitz_from_oracle = false;

  void validate() const;
  /// alpha_k = step_scale / ((L + q rho) (k+1)^zeta).
  double step(std::size_t k) const { return step_with(lipschitz, k); }
  double step_with(double lipschitz_k, std::size_t k) const;
  /// delta_k = delta0 / (k+1)^{beta (2-q)/2}.
  double accuracy(std::size_t k) const;
  /// Constant added per iteration by the AM-GM split at accuracy delta.
  double majorization_slack(double delta) const;
};

struct IterationRecord {
  std::size_t k = 0;
  double f = 0.0;          // f(x_k)
  double f_next = 0.0;     // f(x_{k+1}); for FI-PGM f(y_k)
  double alpha = 0.0;
  double delta = 0.0;
  double lipschitz = 0.0;  // L_k used for the step
  double gm_sq = 0.0;      // ||g_k + p_{k+1}||^2
  double min_gm_sq = 0.0;
  double weighted_gm_sum = 0.0;  // sum_{j<=k} alpha_j ||g_j + p_{j+1}||^2
};

/// Extra per-iteration quantities of the fast method.
struct FastRecord {
  double theta = 0.0;       // theta_k
  double weight_sum = 0.0;  // A_k
  double tau = 0.0;         // tau_k
};

struct RunTrace {
  double f0 = 0.0;
  bool adversarial = false;
  std::vector<IterationRecord> records;
  /// x_0 .. x_K when iterates are stored.
  std::vector<Vector> iterates;
  // FI-PGM only.
  std::vector<FastRecord> fast;
  std::vector<Vector> y;
  std::vector<Vector> z;

  std::size_t size() const { return records.size(); }
};

struct RunOptions {
  std::uint64_t seed = 0;
  /// Candidate oracle answers per iteration; the one with the largest
  /// ||x_{k+1} - x_k|| is committed. 0 and 1 both mean a single draw.
  std::size_t worst_case_directions = 0;
  bool store_iterates = true;
};

/// I-PGM: x_{k+1} = prox_{alpha_k h}(x_k - alpha_k g_k). The oracle for
/// iteration k and candidate j draws from make_rng(seed, k, j).
RunTrace ipgm_run(const Objective& objective, const FirstOrderOracle& oracle, const ProxFunction& h,
                  const ScheduleConfig& config, const Vector& x0, const RunOptions& options = {});

struct AdaptiveRecord {
  std::size_t k = 0;
  double epsilon = 0.0;  // epsilon_k at acceptance
  double f_best = 0.0;
  double best_so_far = 0.0;  // min_{j<=k} f(x_j)
  double rho = 0.0;
  std::size_t retries = 0;
};

struct AdaptiveResult {
  RunTrace trace;
  std::vector<AdaptiveRecord> history;
};

inline constexpr std::size_t kMaxAdaptiveDoublings = 64;

/// I-PGM for unknown f_inf: rho from the fixed-horizon rule with
/// Delta_0^k = f(x0) - f_best^k, horizon = config.max_iters. Requires q in [1, 2).
/// epsilon is halved after acceptance but never below the double spacing at
/// max(|f(x0)|, |best|).
AdaptiveResult ipgm_adaptive_run(const Objective& objective, const FirstOrderOracle& oracle,
                                 const ProxFunction& h, const ScheduleConfig& config, const Vector& x0,
                                 double epsilon0, const RunOptions& options = {});

enum class ThetaRule { kEqualityRoot, kHalfLinear };

double theta_initial(ThetaRule rule);
/// theta_{k_next} given A_{k_next - 1} and the (majorized) constant for k_next.
double theta_next(double weight_sum_prev, double lipschitz_next, ThetaRule rule, std::size_t k_next);

/// FI-PGM with M = L + q rho: y_k = prox_{h/M}(x_k - g_k/M),
/// z_k = prox_h(x0 - sum_{i<=k} theta_i g_i / M), x_{k+1} = tau_k z_k + (1 - tau_k) y_k.
RunTrace fipgm_run(const Objective& objective, const FirstOrderOracle& oracle, const ProxFunction& h,
                   const ScheduleConfig& config, const Vector& x0, ThetaRule rule,
                   const RunOptions& options = {});

/// (x_1 + ... + x_{k+1}) / (k+1).
Vector ergodic_average(const RunTrace& trace, std::size_t k);

enum class GapKind { kNoisyGradient, kHolder };

struct GapParams {
  double lipschitz = 0.0;        // L_F
  double noise = 0.0;            // Delta
  double holder_constant = 0.0;  // H_nu
  double exponent = 1.0;         // nu
};

/// Per-iteration upper bound on dist(0, df(x_{k+1})).
std::vector<double> stationarity_gap(const RunTrace& trace, GapKind kind, const GapParams& params);

/// CSV with header k,f,gm_sq,min_gm_sq,alpha,delta_k and an optional extra
/// `bound` column.
void write_trace_csv(std::ostream& out, const RunTrace& trace, const std::vector<double>* bound = nullptr);

}  // namespace ipg
