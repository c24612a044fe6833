#include "ipg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "ipg/prox.hpp"

namespace ipg {

void OracleCertificate::validate() const {
  require(degree >= 0.0 && degree < 2.0, "certificate degree must lie in [0, 2)");
  require(delta >= 0.0 && std::isfinite(delta), "certificate delta must be nonnegative");
  require(lipschitz > 0.0 && std::isfinite(lipschitz), "certificate L must be positive");
}

Majorization majorize_amgm(double delta, double degree, double rho) {
  require(degree >= 0.0 && degree < 2.0, "majorize_amgm: degree must lie in [0, 2)");
  require(rho > 0.0 && std::isfinite(rho), "majorize_amgm: rho must be positive");
  require(delta >= 0.0, "majorize_amgm: delta must be nonnegative");
  const double q = degree;
  Majorization m;
  m.quad_coeff = q * rho / 2.0;
  // One power of delta rho^{-q/2}: separate powers overflow to inf/inf as q -> 2.
  m.additive = (2.0 - q) / 2.0 * std::pow(delta * std::pow(rho, -q / 2.0), 2.0 / (2.0 - q));
  return m;
}

OracleCertificate restrict_to_ball(const OracleCertificate& degree_one, double radius, double degree) {
  require(degree_one.degree == 1.0, "restrict_to_ball expects a degree-1 certificate");
  require(radius > 0.0, "restrict_to_ball: radius must be positive");
  require(degree >= 0.0 && degree <= 1.0, "restrict_to_ball: degree must lie in [0, 1]");
  OracleCertificate out = degree_one;
  out.delta = degree_one.delta * std::pow(2.0 * radius, 1.0 - degree);
  out.degree = degree;
  return out;
}

// ---------------------------------------------------------------------------

OracleEval eval_noisy_gradient(const SmoothObjective& objective, const Vector& x, double noise_bound,
                               Rng& rng) {
  require(noise_bound >= 0.0, "eval_noisy_gradient: noise bound must be nonnegative");
  OracleEval out;
  out.point = x;
  out.value = objective.value(x);
  out.gradient = objective.gradient(x);
  if (noise_bound > 0.0) out.gradient += bounded_perturbation(x.size(), noise_bound, rng);
  out.certificate = {noise_bound, objective.lipschitz(), 1.0, false};
  return out;
}

OracleEval eval_shifted_point(const SmoothObjective& objective, const Vector& x, double shift_bound,
                              Rng& rng) {
  require(shift_bound >= 0.0, "eval_shifted_point: shift bound must be nonnegative");
  OracleEval out;
  out.point = x;
  out.value = objective.value(x);
  if (shift_bound > 0.0) {
    const Vector shifted = x + bounded_perturbation(x.size(), shift_bound, rng);
    out.gradient = objective.gradient(shifted);
  } else {
    out.gradient = objective.gradient(x);
  }
  const double lf = objective.lipschitz();
  out.certificate = {lf * shift_bound, lf, 1.0, false};
  return out;
}

OracleEval eval_minibatch(const std::vector<std::shared_ptr<const SmoothObjective>>& components,
                          const Vector& x, const std::vector<std::size_t>& batch, BatchScaling scaling,
                          double claimed_delta) {
  require(!components.empty(), "eval_minibatch: no components");
  require(!batch.empty(), "eval_minibatch: empty batch");
  require(claimed_delta >= 0.0, "eval_minibatch: claimed delta must be nonnegative");
  const auto n_comp = static_cast<double>(components.size());

  Vector grad = Vector::Zero(x.size());
  for (std::size_t j : batch) {
    require(j < components.size(), "eval_minibatch: batch index out of range");
    grad += components[j]->gradient(x);
  }
  grad /= static_cast<double>(batch.size());

  double value = 0.0;
  double lipschitz = 0.0;
  for (const auto& c : components) {
    value += c->value(x);
    lipschitz += c->lipschitz();
  }
  if (scaling == BatchScaling::kMean) {
    value /= n_comp;
    lipschitz /= n_comp;
  } else {
    grad *= n_comp;
  }

  OracleEval out;
  out.point = x;
  out.value = value;
  out.gradient = std::move(grad);
  out.certificate = {claimed_delta, lipschitz, 1.0, false};
  return out;
}

// ---------------------------------------------------------------------------

double spectral_norm(const Matrix& a) {
  constexpr int kMaxIterations = 200;
  constexpr double kRelTol = 1e-10;
  if (a.size() == 0) return 0.0;
  Vector v = Vector::Ones(a.cols()) / std::sqrt(static_cast<double>(a.cols()));
  double eig = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    Vector w = a.transpose() * (a * v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    const bool converged = std::fabs(next - eig) <= kRelTol * next;
    eig = next;
    if (converged) break;
  }
  return std::sqrt(eig);
}

SaddleProblem::SaddleProblem(Matrix op_in, Vector center_in, double concavity_in)
    : op(std::move(op_in)), center(std::move(center_in)), concavity(concavity_in) {
  require(concavity > 0.0, "SaddleProblem: concavity must be positive");
  require(center.size() == op.cols(), "SaddleProblem: center must live in the u-space (op columns)");
  op_norm_ = spectral_norm(op);
}

Vector SaddleProblem::maximizer(const Vector& x) const {
  require(x.size() == op.rows(), "SaddleProblem: x dimension mismatch");
  return center + op.transpose() * x / concavity;
}

double SaddleProblem::coupling_value(const Vector& x, const Vector& u) const {
  return -0.5 * concavity * (u - center).squaredNorm() + (op * u).dot(x);
}

OracleEval eval_saddle(const SaddleProblem& saddle, const Vector& x, double inner_accuracy, Rng& rng) {
  require(inner_accuracy >= 0.0, "eval_saddle: inner accuracy must be nonnegative");
  const Vector u_star = saddle.maximizer(x);
  OracleEval out;
  out.point = x;
  out.value = saddle.coupling_value(x, u_star);
  if (inner_accuracy > 0.0) {
    const Vector u_x = u_star + bounded_perturbation(u_star.size(), inner_accuracy, rng);
    out.gradient = saddle.op * u_x;
  } else {
    out.gradient = saddle.op * u_star;
  }
  out.certificate = {inner_accuracy * saddle.op_norm(), saddle.lipschitz(), 1.0, false};
  return out;
}

// ---------------------------------------------------------------------------

HolderFunction::HolderFunction(double exponent, double holder_constant, Vector centers)
    : exponent_(exponent), holder_constant_(holder_constant), centers_(std::move(centers)) {
  require(exponent_ >= 0.0 && exponent_ <= 1.0, "HolderFunction: exponent must lie in [0, 1]");
  require(holder_constant_ > 0.0, "HolderFunction: Hoelder constant must be positive");
}

double HolderFunction::value(const Vector& x) const {
  require(x.size() == centers_.size(), "HolderFunction: dimension mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    total += std::pow(std::fabs(x[i] - centers_[i]), 1.0 + exponent_);
  }
  return total / (1.0 + exponent_);
}

Vector HolderFunction::gradient(const Vector& x) const {
  require(x.size() == centers_.size(), "HolderFunction: dimension mismatch");
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = x[i] - centers_[i];
    g[i] = d == 0.0 ? 0.0 : std::copysign(std::pow(std::fabs(d), exponent_), d);
  }
  return g;
}

double holder_coefficient(double holder_constant, double exponent, double degree) {
  const double nu = exponent;
  const double q = degree;
  require(holder_constant > 0.0, "holder: H_nu must be positive");
  require(nu >= 0.0 && nu <= 1.0, "holder: nu must lie in [0, 1]");
  require(q >= 0.0 && q < 1.0 + nu && q < 2.0, "holder: degree must satisfy 0 <= q < 1 + nu");
  const double lambda = (1.0 + nu - q) / (2.0 - q);
  // pow(0, 0) == 1, so the last factor vanishes from the product when nu = 1.
  return 2.0 * lambda * std::pow(holder_constant / (1.0 + nu), 1.0 / lambda) *
         std::pow((1.0 - nu) / (2.0 - q), (1.0 - nu) / (1.0 + nu - q));
}

double holder_smoothing_constant(double holder_constant, double exponent, double degree, double delta) {
  const double coeff = holder_coefficient(holder_constant, exponent, degree);
  if (exponent == 1.0) return coeff;
  require(delta > 0.0, "holder: delta must be positive when nu < 1");
  return coeff * std::pow(delta, -(1.0 - exponent) / (1.0 + exponent - degree));
}

OracleEval eval_holder(const HolderFunction& holder, const Vector& x, double degree, double delta) {
  OracleEval out;
  out.point = x;
  out.value = holder.value(x);
  out.gradient = holder.gradient(x);
  out.certificate = {delta, holder_smoothing_constant(holder.holder_constant(), holder.exponent(), degree, delta),
                     degree, true};
  return out;
}

// ---------------------------------------------------------------------------

ExactOracle::ExactOracle(std::shared_ptr<const Objective> objective, double lipschitz, double degree,
                         bool convex)
    : objective_(std::move(objective)), lipschitz_(lipschitz), degree_(degree), convex_(convex) {
  OracleCertificate{0.0, lipschitz_, degree_, convex_}.validate();
}

OracleEval ExactOracle::query(const Vector& y, double /*delta*/, Rng& /*rng*/) const {
  OracleEval out;
  out.point = y;
  out.value = objective_->value(y);
  out.gradient = objective_->gradient(y);
  out.certificate = {0.0, lipschitz_, degree_, convex_};
  return out;
}

NoisyGradientOracle::NoisyGradientOracle(std::shared_ptr<const SmoothObjective> objective, double degree,
                                         std::optional<double> ball_radius)
    : objective_(std::move(objective)), degree_(degree), radius_(ball_radius) {
  if (radius_) {
    require(*radius_ > 0.0, "NoisyGradientOracle: radius must be positive");
    require(degree_ >= 0.0 && degree_ <= 1.0, "NoisyGradientOracle: degree must lie in [0, 1] on a ball");
  } else {
    require(degree_ == 1.0, "NoisyGradientOracle: degree must be 1 without a bounded domain");
  }
}

double NoisyGradientOracle::noise_bound_for(double delta) const {
  if (!radius_) return delta;
  return delta / std::pow(2.0 * *radius_, 1.0 - degree_);
}

OracleEval NoisyGradientOracle::query(const Vector& y, double delta, Rng& rng) const {
  OracleEval out = eval_noisy_gradient(*objective_, y, noise_bound_for(delta), rng);
  out.certificate.delta = delta;
  out.certificate.degree = degree_;
  return out;
}

ShiftedPointOracle::ShiftedPointOracle(std::shared_ptr<const SmoothObjective> objective)
    : objective_(std::move(objective)) {}

OracleEval ShiftedPointOracle::query(const Vector& y, double delta, Rng& rng) const {
  OracleEval out = eval_shifted_point(*objective_, y, delta / objective_->lipschitz(), rng);
  out.certificate.delta = delta;
  return out;
}

SaddleOracle::SaddleOracle(std::shared_ptr<const SaddleProblem> saddle) : saddle_(std::move(saddle)) {
  require(saddle_->op_norm() > 0.0, "SaddleOracle: operator must be nonzero");
}

OracleEval SaddleOracle::query(const Vector& y, double delta, Rng& rng) const {
  OracleEval out = eval_saddle(*saddle_, y, delta / saddle_->op_norm(), rng);
  out.certificate.delta = delta;
  return out;
}

HolderOracle::HolderOracle(std::shared_ptr<const HolderFunction> holder, double degree)
    : holder_(std::move(holder)), degree_(degree) {
  holder_coefficient(holder_->holder_constant(), holder_->exponent(), degree_);
}

OracleEval HolderOracle::query(const Vector& y, double delta, Rng& /*rng*/) const {
  return eval_holder(*holder_, y, degree_, delta);
}

MinibatchOracle::MinibatchOracle(std::vector<std::shared_ptr<const SmoothObjective>> components,
                                 std::size_t batch_size, BatchScaling scaling)
    : components_(std::move(components)), batch_size_(batch_size), scaling_(scaling) {
  require(batch_size_ >= 1 && batch_size_ <= components_.size(), "MinibatchOracle: invalid batch size");
}

OracleEval MinibatchOracle::query(const Vector& y, double delta, Rng& rng) const {
  // Partial Fisher-Yates over the index range.
  std::vector<std::size_t> idx(components_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < batch_size_; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(batch_size_);
  return eval_minibatch(components_, y, idx, scaling_, delta);
}

// ---------------------------------------------------------------------------

double certificate_residual(double value_x, const OracleEval& at_y, const Vector& x) {
  const OracleCertificate& c = at_y.certificate;
  const Vector d = x - at_y.point;
  const double r = d.norm();
  return value_x - at_y.value - at_y.gradient.dot(d) - 0.5 * c.lipschitz * r * r -
         c.delta * std::pow(r, c.degree);
}

CertificationReport certify_oracle(const OracleQuery& oracle, const ValueFunction& exact_value,
                                   const PairSampler& sampler, std::size_t pairs, double tolerance,
                                   std::uint64_t seed) {
  require(pairs > 0, "certify_oracle: pairs must be positive");
  require(tolerance >= 0.0, "certify_oracle: tolerance must be nonnegative");
  CertificationReport report;
  report.pairs = pairs;
  report.max_violation = -std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < pairs; ++i) {
    Rng rng = make_rng(seed, i);
    PointPair pair = sampler(rng);
    OracleEval eval = oracle(pair.y, rng);
    eval.certificate.validate();

    const double fx = exact_value(pair.x);
    const double fy = exact_value(pair.y);
    // Zero-order information must be exact.
    const double value_error = std::fabs(eval.value - fy);
    eval.value = fy;

    const double residual = std::max(certificate_residual(fx, eval, pair.x), value_error);
    report.max_violation = std::max(report.max_violation, residual);
    bool failed = residual > tolerance;

    if (eval.certificate.convex_lower_bound) {
      const double gap = fx - fy - eval.gradient.dot(pair.x - pair.y);
      report.min_lower_gap = report.min_lower_gap ? std::min(*report.min_lower_gap, gap) : gap;
      failed = failed || gap < -tolerance;
    }
    if (failed && report.certified) {
      report.certified = false;
      report.violating_certificate = eval.certificate;
      report.violating_pair = std::move(pair);
    }
  }
  return report;
}

PairSampler l1_ball_pair_sampler(Eigen::Index dim, double radius, double local_fraction) {
  return [=](Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    PointPair p;
    p.y = sample_l1_ball(dim, radius, rng);
    if (unif(rng) < local_fraction) {
      const double step = radius * std::pow(10.0, -6.0 * unif(rng));
      Vector dir = bounded_perturbation(dim, 1.0, rng);
      const double n = dir.norm();
      if (n > 0.0) dir /= n;
      p.x = project_l1_ball(p.y + step * dir, radius);
    } else {
      p.x = sample_l1_ball(dim, radius, rng);
    }
    return p;
  };
}

PairSampler box_pair_sampler(Eigen::Index dim, double half_width) {
  return [=](Rng& rng) {
    std::uniform_real_distribution<double> coord(-half_width, half_width);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    PointPair p;
    p.x = Vector(dim);
    p.y = Vector(dim);
    for (Eigen::Index i = 0; i < dim; ++i) p.y[i] = coord(rng);
    if (unif(rng) < 0.5) {
      const double step = half_width * std::pow(10.0, -6.0 * unif(rng));
      for (Eigen::Index i = 0; i < dim; ++i) {
        p.x[i] = std::clamp(p.y[i] + step * (2.0 * unif(rng) - 1.0), -half_width, half_width);
      }
    } else {
      for (Eigen::Index i = 0; i < dim; ++i) p.x[i] = coord(rng);
    }
    return p;
  };
}

}  // namespace ipg
