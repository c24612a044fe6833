#include "ipg/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace ipg {

namespace {
constexpr double kBallSlack = 1e-12;
constexpr double kReproxTolerance = 1e-8;
}  // namespace

ProxFunction ProxFunction::l1_norm(double weight) {
  require(weight > 0.0 && std::isfinite(weight), "l1_norm weight must be positive");
  return ProxFunction(Kind::kL1Norm, weight);
}

ProxFunction ProxFunction::l1_ball(double radius) {
  require(radius > 0.0 && std::isfinite(radius), "l1_ball radius must be positive");
  return ProxFunction(Kind::kL1Ball, radius);
}

bool ProxFunction::contains(const Vector& x) const {
  if (kind_ != Kind::kL1Ball) return x.allFinite();
  return x.lpNorm<1>() <= param_ * (1.0 + kBallSlack);
}

double ProxFunction::value(const Vector& x) const {
  switch (kind_) {
    case Kind::kZero:
      return 0.0;
    case Kind::kL1Norm:
      return param_ * x.lpNorm<1>();
    case Kind::kL1Ball:
      return contains(x) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

Vector ProxFunction::prox(double gamma, const Vector& x) const {
  require(gamma > 0.0, "prox step gamma must be positive");
  switch (kind_) {
    case Kind::kZero:
      return x;
    case Kind::kL1Norm:
      return soft_threshold(x, gamma * param_);
    case Kind::kL1Ball:
      return project_l1_ball(x, param_);
  }
  return x;
}

Vector ProxFunction::implied_subgradient(double gamma, const Vector& pre_prox,
                                         const Vector& post_prox) const {
  require(gamma > 0.0, "prox step gamma must be positive");
  require(pre_prox.size() == post_prox.size(), "implied_subgradient: dimension mismatch");
  const Vector reprox = prox(gamma, pre_prox);
  const double scale = 1.0 + pre_prox.norm();
  if ((reprox - post_prox).norm() > kReproxTolerance * scale) {
    throw InconsistentProxError("implied_subgradient: post_prox is not prox(pre_prox)");
  }
  return (pre_prox - post_prox) / gamma;
}

Vector soft_threshold(const Vector& x, double threshold) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double a = std::fabs(x[i]);
    out[i] = a <= threshold ? 0.0 : std::copysign(a - threshold, x[i]);
  }
  return out;
}

Vector project_l1_ball(const Vector& x, double radius) {
  require(radius > 0.0, "l1-ball radius must be positive");
  if (x.lpNorm<1>() <= radius) return x;

  std::vector<double> mags(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) mags[static_cast<std::size_t>(i)] = std::fabs(x[i]);
  std::stable_sort(mags.begin(), mags.end(), std::greater<>());

  // Largest j with u_j > (sum_{i<=j} u_i - R) / j.
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumulative += mags[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (mags[j] > candidate) threshold = candidate;
  }
  return soft_threshold(x, std::max(threshold, 0.0));
}

}  // namespace ipg
