#include "ipg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ipg/rates.hpp"

namespace ipg {

void ScheduleConfig::validate() const {
  require(lipschitz > 0.0 && std::isfinite(lipschitz), "schedule: L must be positive");
  // rho = 0 is only meaningful without inexactness (no majorization needed).
  require((rho > 0.0 && std::isfinite(rho)) || (rho == 0.0 && delta0 == 0.0),
          "schedule: rho must be positive (or zero when delta0 = 0)");
  require(degree >= 0.0 && degree < 2.0, "schedule: degree must lie in [0, 2)");
  require(delta0 >= 0.0 && std::isfinite(delta0), "schedule: delta0 must be nonnegative");
  require(beta >= 0.0 && beta < 1.0, "schedule: beta must lie in [0, 1)");
  require(zeta >= 0.0 && zeta < 1.0, "schedule: zeta must lie in [0, 1)");
  require(max_iters >= 1, "schedule: max_iters must be positive");
  require(step_scale > 0.0 && step_scale <= 1.0, "schedule: step_scale must lie in (0, 1]");
}

double ScheduleConfig::step_with(double lipschitz_k, std::size_t k) const {
  return step_scale / ((lipschitz_k + degree * rho) * std::pow(static_cast<double>(k) + 1.0, zeta));
}

double ScheduleConfig::accuracy(std::size_t k) const {
  return delta0 / std::pow(static_cast<double>(k) + 1.0, beta * (2.0 - degree) / 2.0);
}

double ScheduleConfig::majorization_slack(double delta) const {
  if (delta == 0.0) return 0.0;
  return majorize_amgm(delta, degree, rho).additive;
}

namespace {

double composite_value(const Objective& objective, const ProxFunction& h, const Vector& x) {
  return objective.value(x) + h.value(x);
}

void check_start(const Objective& objective, const FirstOrderOracle& oracle, const ProxFunction& h,
                 const ScheduleConfig& config, const Vector& x0) {
  config.validate();
  require(x0.size() == objective.dimension(), "solver: x0 has the wrong dimension");
  require(h.contains(x0), "solver: x0 is outside dom h");
  require(oracle.degree() == config.degree, "solver: oracle degree differs from the schedule degree");
}

class DivergenceGuard {
 public:
  explicit DivergenceGuard(double f0) : f0_(f0), limit_(f0 + 1e6 * (1.0 + std::abs(f0))) {
    if (!std::isfinite(f0)) throw DivergenceError("solver: f(x0) is not finite");
  }
  void check(double f, std::size_t k) const {
    if (!std::isfinite(f) || f > limit_) {
      throw DivergenceError("solver: objective " + std::to_string(f) + " at iteration " + std::to_string(k) +
                            " left the trust region above f(x0) = " + std::to_string(f0_));
    }
  }

 private:
  double f0_;
  double limit_;
};

struct Step {
  Vector next;
  double lipschitz = 0.0;
  double alpha = 0.0;
};

// One prox-gradient step per candidate oracle answer; keeps the largest
// displacement, first candidate on ties.
Step best_prox_step(const FirstOrderOracle& oracle, const ProxFunction& h, const ScheduleConfig& config,
                    const Vector& x, std::size_t k, double delta, const RunOptions& options) {
  const std::size_t candidates = std::max<std::size_t>(1, options.worst_case_directions);
  Step best;
  double best_move = -1.0;
  for (std::size_t j = 0; j < candidates; ++j) {
    Rng rng = make_rng(options.seed, k, j);
    const OracleEval eval = oracle.query(x, delta, rng);
    const double lk = config.lipschitz_from_oracle ? eval.certificate.lipschitz : config.lipschitz;
    const double alpha = config.step_with(lk, k);
    Vector next = h.prox(alpha, x - alpha * eval.gradient);
    const double move = (next - x).squaredNorm();
    if (move > best_move) {
      best_move = move;
      best = {std::move(next), lk, alpha};
    }
  }
  return best;
}

}  // namespace

RunTrace ipgm_run(const Objective& objective, const FirstOrderOracle& oracle, const ProxFunction& h,
                  const ScheduleConfig& config, const Vector& x0, const RunOptions& options) {
  check_start(objective, oracle, h, config, x0);
  RunTrace trace;
  trace.adversarial = options.worst_case_directions > 1;
  trace.f0 = composite_value(objective, h, x0);
  const DivergenceGuard guard(trace.f0);
  trace.records.reserve(config.max_iters);
  if (options.store_iterates) {
    trace.iterates.reserve(config.max_iters + 1);
    trace.iterates.push_back(x0);
  }

  Vector x = x0;
  double f = trace.f0;
  double min_gm_sq = std::numeric_limits<double>::infinity();
  double weighted = 0.0;
  for (std::size_t k = 0; k < config.max_iters; ++k) {
    const double delta = config.accuracy(k);
    Step step = best_prox_step(oracle, h, config, x, k, delta, options);
    const double f_next = composite_value(objective, h, step.next);
    guard.check(f_next, k + 1);

    IterationRecord rec;
    rec.k = k;
    rec.f = f;
    rec.f_next = f_next;
    rec.alpha = step.alpha;
    rec.delta = delta;
    rec.lipschitz = step.lipschitz;
    rec.gm_sq = (step.next - x).squaredNorm() / (step.alpha * step.alpha);
    min_gm_sq = std::min(min_gm_sq, rec.gm_sq);
    rec.min_gm_sq = min_gm_sq;
    weighted += step.alpha * rec.gm_sq;
    rec.weighted_gm_sum = weighted;
    trace.records.push_back(rec);

    x = std::move(step.next);
    f = f_next;
    if (options.store_iterates) trace.iterates.push_back(x);
  }
  return trace;
}

AdaptiveResult ipgm_adaptive_run(const Objective& objective, const FirstOrderOracle& oracle,
                                 const ProxFunction& h, const ScheduleConfig& config, const Vector& x0,
                                 double epsilon0, const RunOptions& options) {
  check_start(objective, oracle, h, config, x0);
  require(epsilon0 > 0.0 && std::isfinite(epsilon0), "adaptive: epsilon0 must be positive");
  require(config.degree >= 1.0, "adaptive: the fixed-horizon rho rule needs q in [1, 2)");

  AdaptiveResult result;
  RunTrace& trace = result.trace;
  trace.f0 = composite_value(objective, h, x0);
  const DivergenceGuard guard(trace.f0);
  if (options.store_iterates) trace.iterates.push_back(x0);

  const double horizon = static_cast<double>(config.max_iters);
  Vector x = x0;
  double f = trace.f0;
  double best = trace.f0;
  double epsilon = epsilon0;
  double min_gm_sq = std::numeric_limits<double>::infinity();
  double weighted = 0.0;
  for (std::size_t k = 0; k < config.max_iters; ++k) {
    const double delta = config.accuracy(k);
    Rng rng = make_rng(options.seed, k, 0);
    const OracleEval eval = oracle.query(x, delta, rng);
    const double lk = config.lipschitz_from_oracle ? eval.certificate.lipschitz : config.lipschitz;

    std::size_t retries = 0;
    double f_best = 0.0, rho = 0.0, alpha = 0.0, f_next = 0.0;
    Vector next;
    while (true) {
      f_best = best - epsilon;
      rho = rho_opt_fixed_horizon(lk, config.degree, delta, trace.f0 - f_best, horizon);
      alpha = config.step_scale / ((lk + config.degree * rho) * std::pow(static_cast<double>(k) + 1.0, config.zeta));
      next = h.prox(alpha, x - alpha * eval.gradient);
      f_next = composite_value(objective, h, next);
      guard.check(f_next, k + 1);
      if (f_next >= f_best) break;
      if (retries == kMaxAdaptiveDoublings) {
        throw DivergenceError("adaptive: no acceptance after 64 doublings of epsilon at iteration " +
                              std::to_string(k));
      }
      epsilon *= 2.0;
      ++retries;
    }

    result.history.push_back({k, epsilon, f_best, best, rho, retries});
    IterationRecord rec;
    rec.k = k;
    rec.f = f;
    rec.f_next = f_next;
    rec.alpha = alpha;
    rec.delta = delta;
    rec.lipschitz = lk;
    rec.gm_sq = (next - x).squaredNorm() / (alpha * alpha);
    min_gm_sq = std::min(min_gm_sq, rec.gm_sq);
    rec.min_gm_sq = min_gm_sq;
    weighted += alpha * rec.gm_sq;
    rec.weighted_gm_sum = weighted;
    trace.records.push_back(rec);

    x = std::move(next);
    f = f_next;
    best = std::min(best, f);
    // Delta_0^k = f(x0) - best + epsilon cannot resolve epsilon below the
    // spacing of doubles near f(x0) or best; halving past that only piles up
    // doublings for the next new record.
    const double resolution = std::numeric_limits<double>::epsilon() * std::max(std::abs(trace.f0), std::abs(best));
    epsilon = std::max(0.5 * epsilon, resolution);
    if (options.store_iterates) trace.iterates.push_back(x);
  }
  return result;
}

double theta_initial(ThetaRule rule) { return rule == ThetaRule::kEqualityRoot ? 1.0 : 0.5; }

double theta_next(double weight_sum_prev, double lipschitz_next, ThetaRule rule, std::size_t k_next) {
  require(lipschitz_next > 0.0, "theta_next: L must be positive");
  require(weight_sum_prev >= 0.0, "theta_next: A must be nonnegative");
  if (rule == ThetaRule::kHalfLinear) return (static_cast<double>(k_next) + 1.0) / 2.0;
  return (1.0 + std::sqrt(1.0 + 4.0 * lipschitz_next * weight_sum_prev)) / 2.0;
}

RunTrace fipgm_run(const Objective& objective, const FirstOrderOracle& oracle, const ProxFunction& h,
                   const ScheduleConfig& config, const Vector& x0, ThetaRule rule, const RunOptions& options) {
  check_start(objective, oracle, h, config, x0);
  require(!config.lipschitz_from_oracle, "fipgm: L_k must be constant");

  RunTrace trace;
  trace.f0 = composite_value(objective, h, x0);
  const DivergenceGuard guard(trace.f0);
  if (options.store_iterates) trace.iterates.push_back(x0);

  const double m = config.lipschitz + config.degree * config.rho;
  Vector x = x0;
  Vector weighted_grads = Vector::Zero(x0.size());
  double theta = theta_initial(rule);
  double weight_sum = theta / m;
  double f = trace.f0;
  double min_gm_sq = std::numeric_limits<double>::infinity();
  double weighted = 0.0;
  for (std::size_t k = 0; k < config.max_iters; ++k) {
    const double delta = config.accuracy(k);
    Rng rng = make_rng(options.seed, k, 0);
    const OracleEval eval = oracle.query(x, delta, rng);
    require(eval.certificate.convex_lower_bound, "fipgm: oracle must claim the convex lower bound");

    const double alpha = config.step(k);
    Vector y = h.prox(alpha, x - alpha * eval.gradient);
    weighted_grads += (theta / m) * eval.gradient;
    Vector z = h.prox(1.0, x0 - weighted_grads);

    const double theta_new = theta_next(weight_sum, m, rule, k + 1);
    const double weight_sum_new = weight_sum + theta_new / m;
    const double tau = theta_new / (weight_sum_new * m);
    if (!(tau > 0.0 && tau <= 1.0)) {
      throw std::logic_error("fipgm: tau = " + std::to_string(tau) + " outside (0, 1]");
    }

    const double f_y = composite_value(objective, h, y);
    guard.check(f_y, k);
    IterationRecord rec;
    rec.k = k;
    rec.f = f;
    rec.f_next = f_y;
    rec.alpha = alpha;
    rec.delta = delta;
    rec.lipschitz = config.lipschitz;
    rec.gm_sq = (y - x).squaredNorm() / (alpha * alpha);
    min_gm_sq = std::min(min_gm_sq, rec.gm_sq);
    rec.min_gm_sq = min_gm_sq;
    weighted += alpha * rec.gm_sq;
    rec.weighted_gm_sum = weighted;
    trace.records.push_back(rec);
    trace.fast.push_back({theta, weight_sum, tau});

    x = tau * z + (1.0 - tau) * y;
    f = composite_value(objective, h, x);
    guard.check(f, k + 1);
    if (options.store_iterates) {
      trace.y.push_back(std::move(y));
      trace.z.push_back(std::move(z));
      trace.iterates.push_back(x);
    }
    theta = theta_new;
    weight_sum = weight_sum_new;
  }
  return trace;
}

Vector ergodic_average(const RunTrace& trace, std::size_t k) {
  require(!trace.iterates.empty(), "ergodic_average: trace has no stored iterates");
  require(k + 1 < trace.iterates.size(), "ergodic_average: k is beyond the trace");
  Vector sum = Vector::Zero(trace.iterates.front().size());
  for (std::size_t i = 1; i <= k + 1; ++i) sum += trace.iterates[i];
  return sum / static_cast<double>(k + 1);
}

std::vector<double> stationarity_gap(const RunTrace& trace, GapKind kind, const GapParams& params) {
  std::vector<double> gaps;
  gaps.reserve(trace.size());
  for (const auto& rec : trace.records) {
    const double gm = std::sqrt(rec.gm_sq);
    const double move = rec.alpha * gm;
    if (kind == GapKind::kNoisyGradient) {
      gaps.push_back(gm + params.lipschitz * move + params.noise);
    } else {
      gaps.push_back(gm + params.holder_constant * std::pow(move, params.exponent));
    }
  }
  return gaps;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace, const std::vector<double>* bound) {
  require(!bound || bound->size() == trace.size(), "write_trace_csv: bound column has the wrong length");
  const auto old_precision = out.precision(17);
  out << "k,f,gm_sq,min_gm_sq,alpha,delta_k" << (bound ? ",bound" : "") << '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace.records[i];
    out << r.k << ',' << r.f << ',' << r.gm_sq << ',' << r.min_gm_sq << ',' << r.alpha << ',' << r.delta;
    if (bound) out << ',' << (*bound)[i];
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace ipg
