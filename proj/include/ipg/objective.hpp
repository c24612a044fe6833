#pragma once

#include <functional>
#include <utility>

#include "ipg/types.hpp"

namespace ipg {

/// Zero- and first-order access to F. `gradient` returns an element of the
/// subdifferential when F is not differentiable.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual Eigen::Index dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
};

/// Objective with an L_F-Lipschitz gradient.
class SmoothObjective : public Objective {
 public:
  virtual double lipschitz() const = 0;
};

/// Lambda-backed smooth objective, mostly for small hand-checked cases.
class FunctionObjective final : public SmoothObjective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  FunctionObjective(Eigen::Index dim, ValueFn value, GradientFn gradient, double lipschitz)
      : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)), lipschitz_(lipschitz) {}

  Eigen::Index dimension() const override { return dim_; }
  double value(const Vector& x) const override { return value_(x); }
  Vector gradient(const Vector& x) const override { return gradient_(x); }
  double lipschitz() const override { return lipschitz_; }

 private:
  Eigen::Index dim_;
  ValueFn value_;
  GradientFn gradient_;
  double lipschitz_;
};

}  // namespace ipg
