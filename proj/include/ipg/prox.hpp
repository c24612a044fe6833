#pragma once

#include "ipg/types.hpp"

namespace ipg {

/// The simple convex term h of f = F + h.
class ProxFunction {
 public:
  enum class Kind { kZero, kL1Norm, kL1Ball };

  static ProxFunction zero() { return ProxFunction(Kind::kZero, 0.0); }
  /// h(x) = weight * ||x||_1.
  static ProxFunction l1_norm(double weight);
  /// Indicator of {x : ||x||_1 <= radius}.
  static ProxFunction l1_ball(double radius);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }

  /// +infinity outside the ball; membership uses a relative slack of 1e-12.
  double value(const Vector& x) const;
  bool contains(const Vector& x) const;

  /// argmin_y h(y) + ||x - y||^2 / (2 gamma).
  Vector prox(double gamma, const Vector& x) const;

  /// p = (pre - post) / gamma, the element of dh(post) given by prox
  /// optimality. Throws InconsistentProxError if post is not prox(pre).
  Vector implied_subgradient(double gamma, const Vector& pre_prox, const Vector& post_prox) const;

 private:
  ProxFunction(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_;
  double param_;
};

/// Coordinatewise sign(x) max(|x| - threshold, 0).
Vector soft_threshold(const Vector& x, double threshold);

/// Euclidean projection onto the l1-ball by the full-sort threshold method.
Vector project_l1_ball(const Vector& x, double radius);

}  // namespace ipg
