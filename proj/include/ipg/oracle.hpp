#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "ipg/objective.hpp"
#include "ipg/types.hpp"

namespace ipg {

/// Claimed (delta, L, q) such that for all feasible x
///   F(x) - F(y) - <g(y), x - y> <= L/2 ||x - y||^2 + delta ||x - y||^q,
/// and, when convex_lower_bound is set, the left-hand side is also >= 0.
struct OracleCertificate {
  double delta = 0.0;
  double lipschitz = 1.0;
  double degree = 0.0;
  bool convex_lower_bound = false;

  /// Throws std::invalid_argument unless 0 <= degree < 2, delta >= 0, lipschitz > 0.
  void validate() const;
};

/// Exact zero-order value plus an approximate gradient at `point`.
struct OracleEval {
  Vector point;
  double value = 0.0;
  Vector gradient;
  OracleCertificate certificate;
};

struct Majorization {
  double quad_coeff = 0.0;
  double additive = 0.0;
};

/// Weighted AM-GM split of a degree-q error term:
///   delta r^q <= (q rho / 2) r^2 + (2-q) delta^{2/(2-q)} / (2 rho^{q/(2-q)})  for r >= 0.
Majorization majorize_amgm(double delta, double degree, double rho);

/// A degree-1 certificate (delta, L, 1) restricted to a set of diameter
/// 2*radius becomes (delta (2 radius)^{1-q}, L, q) for any q in [0, 1].
OracleCertificate restrict_to_ball(const OracleCertificate& degree_one, double radius, double degree);

// ---------------------------------------------------------------------------
// Constructive oracle families.

/// grad F(x) + e with ||e|| <= noise_bound; certificate (noise_bound, L_F, 1).
OracleEval eval_noisy_gradient(const SmoothObjective& objective, const Vector& x, double noise_bound,
                               Rng& rng);

/// grad F(xbar) with ||x - xbar|| <= shift_bound; certificate (L_F shift_bound, L_F, 1).
OracleEval eval_shifted_point(const SmoothObjective& objective, const Vector& x, double shift_bound,
                              Rng& rng);

enum class BatchScaling { kMean, kSum };

/// Mini-batch gradient over `batch` (0-based indices). Under kMean the pair
/// (value, gradient) refers to (1/N) sum F_i, under kSum to sum F_i. The
/// certificate carries `claimed_delta` unverified.
OracleEval eval_minibatch(const std::vector<std::shared_ptr<const SmoothObjective>>& components,
                          const Vector& x, const std::vector<std::size_t>& batch, BatchScaling scaling,
                          double claimed_delta = 0.0);

/// F(x) = max_u G(u) + <A u, x> with G(u) = -(kappa/2) ||u - c||^2.
struct SaddleProblem {
  Matrix op;          // A: maps u-space (cols) into x-space (rows)
  Vector center;      // c
  double concavity;   // kappa

  SaddleProblem(Matrix op, Vector center, double concavity);

  /// u*(x) = c + A^T x / kappa.
  Vector maximizer(const Vector& x) const;
  /// psi(x, u).
  double coupling_value(const Vector& x, const Vector& u) const;
  double value(const Vector& x) const { return coupling_value(x, maximizer(x)); }
  double op_norm() const { return op_norm_; }
  double lipschitz() const { return op_norm_ * op_norm_ / concavity; }

 private:
  double op_norm_;
};

/// Largest singular value by power iteration on A^T A (200 iterations,
/// 1e-10 relative tolerance, all-ones start).
double spectral_norm(const Matrix& a);

/// A u_x with ||u_x - u*(x)|| <= inner_accuracy; certificate
/// (inner_accuracy ||A||, ||A||^2 / kappa, 1).
OracleEval eval_saddle(const SaddleProblem& saddle, const Vector& x, double inner_accuracy, Rng& rng);

/// Separable F(x) = sum |x_i - c_i|^{1+nu} / (1+nu), whose gradient
/// sign(x_i - c_i) |x_i - c_i|^nu is nu-Hoelder with constant holder_constant.
class HolderFunction final : public Objective {
 public:
  HolderFunction(double exponent, double holder_constant, Vector centers);

  Eigen::Index dimension() const override { return centers_.size(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;

  double exponent() const { return exponent_; }
  double holder_constant() const { return holder_constant_; }
  const Vector& centers() const { return centers_; }

 private:
  double exponent_;
  double holder_constant_;
  Vector centers_;
};

/// C(H, q) with L(delta) = C(H, q) * delta^{-(1-nu)/(1+nu-q)}.
double holder_coefficient(double holder_constant, double exponent, double degree);

/// L(delta) such that (H/(1+nu)) r^{1+nu} <= (L/2) r^2 + delta r^q for r >= 0.
/// Uses 0^0 = 1, so nu = 1 gives L = H for every delta.
double holder_smoothing_constant(double holder_constant, double exponent, double degree, double delta);

/// Exact subgradient with certificate (delta, L(delta), q, convex).
OracleEval eval_holder(const HolderFunction& holder, const Vector& x, double degree, double delta);

// ---------------------------------------------------------------------------
// Oracle handles consumed by the solvers. `query` returns an answer whose
// certificate accuracy is `delta`; each family maps delta to its own
// inexactness parameter.

class FirstOrderOracle {
 public:
  virtual ~FirstOrderOracle() = default;
  virtual double degree() const = 0;
  virtual OracleEval query(const Vector& y, double delta, Rng& rng) const = 0;
};

class ExactOracle final : public FirstOrderOracle {
 public:
  ExactOracle(std::shared_ptr<const Objective> objective, double lipschitz, double degree,
              bool convex = false);
  double degree() const override { return degree_; }
  OracleEval query(const Vector& y, double delta, Rng& rng) const override;

 private:
  std::shared_ptr<const Objective> objective_;
  double lipschitz_;
  double degree_;
  bool convex_;
};

/// Noisy gradient. Without a radius only q = 1 is valid (noise bound = delta);
/// with an l1-ball radius R any q in [0, 1] works via noise bound
/// delta / (2R)^{1-q}.
class NoisyGradientOracle final : public FirstOrderOracle {
 public:
  NoisyGradientOracle(std::shared_ptr<const SmoothObjective> objective, double degree,
                      std::optional<double> ball_radius = std::nullopt);
  double degree() const override { return degree_; }
  double noise_bound_for(double delta) const;
  OracleEval query(const Vector& y, double delta, Rng& rng) const override;

 private:
  std::shared_ptr<const SmoothObjective> objective_;
  double degree_;
  std::optional<double> radius_;
};

class ShiftedPointOracle final : public FirstOrderOracle {
 public:
  explicit ShiftedPointOracle(std::shared_ptr<const SmoothObjective> objective);
  double degree() const override { return 1.0; }
  OracleEval query(const Vector& y, double delta, Rng& rng) const override;

 private:
  std::shared_ptr<const SmoothObjective> objective_;
};

class SaddleOracle final : public FirstOrderOracle {
 public:
  explicit SaddleOracle(std::shared_ptr<const SaddleProblem> saddle);
  double degree() const override { return 1.0; }
  OracleEval query(const Vector& y, double delta, Rng& rng) const override;

 private:
  std::shared_ptr<const SaddleProblem> saddle_;
};

class HolderOracle final : public FirstOrderOracle {
 public:
  HolderOracle(std::shared_ptr<const HolderFunction> holder, double degree);
  double degree() const override { return degree_; }
  OracleEval query(const Vector& y, double delta, Rng& rng) const override;

 private:
  std::shared_ptr<const HolderFunction> holder_;
  double degree_;
};

/// Draws a batch of `batch_size` distinct indices per query.
class MinibatchOracle final : public FirstOrderOracle {
 public:
  MinibatchOracle(std::vector<std::shared_ptr<const SmoothObjective>> components, std::size_t batch_size,
                  BatchScaling scaling = BatchScaling::kMean);
  double degree() const override { return 1.0; }
  OracleEval query(const Vector& y, double delta, Rng& rng) const override;

 private:
  std::vector<std::shared_ptr<const SmoothObjective>> components_;
  std::size_t batch_size_;
  BatchScaling scaling_;
};

// ---------------------------------------------------------------------------
// Empirical certification.

struct PointPair {
  Vector x;
  Vector y;
};

using PairSampler = std::function<PointPair(Rng&)>;
using OracleQuery = std::function<OracleEval(const Vector& y, Rng& rng)>;
using ValueFunction = std::function<double(const Vector&)>;

struct CertificationReport {
  bool certified = true;
  std::size_t pairs = 0;
  /// max over pairs of the upper-bound residual (<= tolerance to certify).
  double max_violation = 0.0;
  /// min over pairs of F(x) - F(y) - <g, x - y>; only when the lower bound is claimed.
  std::optional<double> min_lower_gap;
  /// First pair that broke either inequality.
  std::optional<PointPair> violating_pair;
  std::optional<OracleCertificate> violating_certificate;
};

/// Residual of the upper inequality for one pair; positive means violated.
double certificate_residual(double value_x, const OracleEval& at_y, const Vector& x);

CertificationReport certify_oracle(const OracleQuery& oracle, const ValueFunction& exact_value,
                                   const PairSampler& sampler, std::size_t pairs, double tolerance = 1e-7,
                                   std::uint64_t seed = 0);

/// Samplers for the usual test domains.
PairSampler l1_ball_pair_sampler(Eigen::Index dim, double radius, double local_fraction = 0.5);
PairSampler box_pair_sampler(Eigen::Index dim, double half_width);

}  // namespace ipg
