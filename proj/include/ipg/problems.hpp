#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>

#include "ipg/objective.hpp"
#include "ipg/oracle.hpp"
#include "ipg/prox.hpp"

namespace ipg {

/// F(x) = sum_i log((a_i^T x - b_i)^2 + 1) over {||x||_1 <= R}. Rows of
/// `rows` are the vectors a_i. F >= 0, so 0 is a valid lower bound.
class LogSumProblem final : public SmoothObjective {
 public:
  LogSumProblem(Matrix rows, Vector targets, double radius, std::optional<Vector> ground_truth = std::nullopt);

  Eigen::Index dimension() const override { return rows_.cols(); }
  Eigen::Index num_terms() const { return rows_.rows(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::pair<double, Vector> evaluate(const Vector& x) const;

  /// L_F = sum_i ||a_i||^2.
  double lipschitz() const override { return lipschitz_; }
  double lower_bound() const { return 0.0; }
  double radius() const { return radius_; }
  ProxFunction constraint() const { return ProxFunction::l1_ball(radius_); }

  const Matrix& rows() const { return rows_; }
  const Vector& targets() const { return targets_; }
  const std::optional<Vector>& ground_truth() const { return ground_truth_; }

 private:
  Matrix rows_;
  Vector targets_;
  double radius_;
  double lipschitz_;
  std::optional<Vector> ground_truth_;
};

/// Rows a_i ~ N(0, I/n), x_true uniform in the l1-ball, b = A x_true + noise.
/// Noise is Gaussian with standard deviation `noise_level`, defaulting to
/// 0.01 ||A x_true|| / sqrt(N).
LogSumProblem generate_logsum_instance(Eigen::Index n, Eigen::Index num_terms, double radius,
                                       std::optional<double> noise_level, std::uint64_t seed);

/// F(x) = 1/2 ||A x - b||^2 with its minimizer and optimal value.
class QuadraticProblem final : public SmoothObjective {
 public:
  QuadraticProblem(Matrix op, Vector offset);

  static QuadraticProblem identity(Eigen::Index n);

  Eigen::Index dimension() const override { return op_.cols(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  /// Largest eigenvalue of A^T A.
  double lipschitz() const override { return lipschitz_; }

  const Matrix& op() const { return op_; }
  const Vector& offset() const { return offset_; }
  const Vector& minimizer() const { return minimizer_; }
  double optimal_value() const { return optimal_value_; }
  double distance_to_minimizer(const Vector& x) const { return (x - minimizer_).norm(); }

 private:
  Matrix op_;
  Vector offset_;
  Vector minimizer_;
  double optimal_value_;
  double lipschitz_;
};

/// 2n x n operator with singular values log-spaced from 1 down to
/// 1/conditioning, and an offset with a nonzero residual orthogonal to the
/// range, so f* > 0.
QuadraticProblem generate_quadratic_instance(Eigen::Index n, double conditioning, std::uint64_t seed);

/// Separable power function with centers uniform in [-box/2, box/2]^n and an
/// empirically estimated Hoelder constant (inflated by 10%). nu = 1 gives H = 1.
HolderFunction generate_holder_instance(Eigen::Index n, double nu, std::uint64_t seed,
                                        double box_half_width = 4.0);

/// Empirical Euclidean Hoelder constant of the gradient over `pairs` samples
/// in [-box, box]^n (uniform pairs and pairs mirrored about the centers).
double estimate_holder_constant(const HolderFunction& f, double box_half_width, std::size_t pairs,
                                std::uint64_t seed);

// Textual instance format: a header line "ipg-instance <kind> 1", the
// dimensions, then whitespace-separated values at full precision.
void save_instance(std::ostream& out, const LogSumProblem& problem);
void save_instance(std::ostream& out, const QuadraticProblem& problem);
void save_instance(std::ostream& out, const HolderFunction& problem);
LogSumProblem load_logsum_instance(std::istream& in);
QuadraticProblem load_quadratic_instance(std::istream& in);
HolderFunction load_holder_instance(std::istream& in);

}  // namespace ipg
