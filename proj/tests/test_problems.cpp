#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ipg/oracle.hpp"
#include "ipg/problems.hpp"
#include "support.hpp"

using namespace ipg;
using ipg::testing::central_difference;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("logsum 1-D examples") {
  // a = 1, b = 0: F(1) = log 2 and F'(1) = 2x / (x^2 + 1) = 1.
  const LogSumProblem p(Matrix::Ones(1, 1), Vector::Zero(1), 4.0);
  CHECK(p.value(vec({1})) == doctest::Approx(std::log(2.0)));
  CHECK(p.gradient(vec({1}))[0] == doctest::Approx(1.0));
  const Vector fd = central_difference([&](const Vector& x) { return p.value(x); }, vec({1}));
  CHECK(fd[0] == doctest::Approx(1.0).epsilon(1e-8));
  const auto [v, g] = p.evaluate(vec({1}));
  CHECK(v == p.value(vec({1})));
  CHECK(g == p.gradient(vec({1})));
}

TEST_CASE("logsum Lipschitz constant is the sum of squared row norms") {
  Matrix a(2, 2);
  a << 1, 0, 0, 2;
  const LogSumProblem p(a, Vector::Zero(2), 1.0);
  CHECK(p.lipschitz() == 5.0);
  CHECK(p.lower_bound() == 0.0);
  CHECK(p.constraint().kind() == ProxFunction::Kind::kL1Ball);
}

TEST_CASE("logsum instance without noise vanishes at the ground truth") {
  const LogSumProblem p = generate_logsum_instance(16, 32, 4.0, 0.0, 3);
  REQUIRE(p.ground_truth().has_value());
  CHECK(p.value(*p.ground_truth()) == 0.0);
  CHECK(p.ground_truth()->lpNorm<1>() <= 4.0 + 1e-12);
}

TEST_CASE("canonical instance: shape, feasibility of the truth, finite differences") {
  const auto& p = ipg::testing::canonical_instance();
  CHECK(p.dimension() == 64);
  CHECK(p.num_terms() == 128);
  CHECK(p.radius() == 4.0);
  REQUIRE(p.ground_truth().has_value());
  CHECK(p.ground_truth()->lpNorm<1>() <= 4.0 + 1e-12);
  // Rows ~ N(0, I/n): the sum of squared norms concentrates near N.
  CHECK(p.lipschitz() == doctest::Approx(128.0).epsilon(0.1));

  Rng rng = make_rng(12);
  for (int t = 0; t < 100; ++t) {
    const Vector x = sample_l1_ball(64, 4.0, rng);
    const Vector fd = central_difference([&](const Vector& z) { return p.value(z); }, x);
    CHECK((p.gradient(x) - fd).lpNorm<Eigen::Infinity>() <= 1e-5);
  }
  for (int t = 0; t < 10000; ++t) CHECK(p.value(sample_l1_ball(64, 4.0, rng)) >= 0.0);
}

TEST_CASE("logsum generation is reproducible and validates its inputs") {
  const LogSumProblem a = generate_logsum_instance(8, 10, 2.0, std::nullopt, 99);
  const LogSumProblem b = generate_logsum_instance(8, 10, 2.0, std::nullopt, 99);
  const LogSumProblem c = generate_logsum_instance(8, 10, 2.0, std::nullopt, 100);
  CHECK(a.rows() == b.rows());
  CHECK(a.targets() == b.targets());
  CHECK(a.rows() != c.rows());
  CHECK_THROWS_AS(generate_logsum_instance(0, 10, 2.0, std::nullopt, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_logsum_instance(8, 0, 2.0, std::nullopt, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_logsum_instance(8, 10, 0.0, std::nullopt, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_logsum_instance(8, 10, 2.0, -1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(LogSumProblem(Matrix::Ones(2, 2), Vector::Zero(3), 1.0), std::invalid_argument);
}

TEST_CASE("quadratic identity case") {
  const QuadraticProblem p = QuadraticProblem::identity(3);
  CHECK(p.lipschitz() == doctest::Approx(1.0));
  CHECK(p.optimal_value() == doctest::Approx(0.0));
  CHECK(p.value(vec({1, 2, 2})) == doctest::Approx(4.5));
  CHECK(p.distance_to_minimizer(vec({1, 2, 2})) == doctest::Approx(3.0));
}

TEST_CASE("quadratic instance: conditioning, optimality, positive optimal value") {
  const QuadraticProblem& p = ipg::testing::convex_instance();
  CHECK(p.op().rows() == 64);
  CHECK(p.op().cols() == 32);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(p.op().transpose() * p.op());
  const Vector ev = eig.eigenvalues();
  CHECK(ev.maxCoeff() / ev.minCoeff() == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(p.lipschitz() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.gradient(p.minimizer()).norm() <= 1e-10);
  CHECK(p.optimal_value() > 0.0);
  const Vector fd = central_difference([&](const Vector& x) { return p.value(x); }, Vector::Ones(32));
  CHECK((fd - p.gradient(Vector::Ones(32))).norm() <= 1e-6);
  CHECK_THROWS_AS(generate_quadratic_instance(8, 0.5, 0), std::invalid_argument);
}

TEST_CASE("Hoelder instance: smooth case and a 1-D example") {
  const HolderFunction smooth = generate_holder_instance(5, 1.0, 2);
  CHECK(smooth.holder_constant() == 1.0);
  // nu = 1/2, center 0: F(4) = 4^{3/2} / 1.5, g(4) = 4^{1/2}.
  const HolderFunction f(0.5, 1.0, Vector::Zero(1));
  CHECK(f.value(vec({4})) == doctest::Approx(8.0 / 1.5));
  CHECK(f.gradient(vec({4}))[0] == doctest::Approx(2.0));
  CHECK(f.gradient(vec({-4}))[0] == doctest::Approx(-2.0));
  CHECK_THROWS(generate_holder_instance(3, 1.5, 0));
  CHECK_THROWS(generate_holder_instance(3, -0.1, 0));
}

TEST_CASE("Hoelder instance: estimated constant matches the closed-form supremum") {
  // For the separable power the ratio peaks at 2^{1-nu} n^{(1-nu)/2} (equal
  // offsets mirrored about every center).
  for (const auto& [n, nu] : {std::pair<Eigen::Index, double>{4, 0.5}, {8, 0.25}, {2, 0.75}}) {
    const HolderFunction f = generate_holder_instance(n, nu, 4);
    const double sup = std::pow(2.0, 1.0 - nu) * std::pow(static_cast<double>(n), (1.0 - nu) / 2.0);
    CHECK(f.holder_constant() / 1.1 == doctest::Approx(sup).epsilon(1e-3));
    // And no sampled pair beats the inflated constant.
    Rng rng = make_rng(5, static_cast<std::uint64_t>(n));
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int t = 0; t < 2000; ++t) {
      Vector x(n), y(n);
      for (Eigen::Index i = 0; i < n; ++i) x[i] = u(rng), y[i] = u(rng);
      CHECK((f.gradient(x) - f.gradient(y)).norm() <= f.holder_constant() * std::pow((x - y).norm(), nu));
    }
  }
}

TEST_CASE("Hoelder instance certifies with its smoothing constant on the box") {
  const auto f = std::make_shared<const HolderFunction>(generate_holder_instance(6, 0.5, 11));
  const HolderOracle oracle(f, 0.5);
  const OracleQuery query = [&](const Vector& y, Rng& rng) { return oracle.query(y, 0.1, rng); };
  const auto report =
      certify_oracle(query, [&](const Vector& x) { return f->value(x); }, box_pair_sampler(6, 4.0), 2000);
  CHECK(report.certified);
  REQUIRE(report.min_lower_gap.has_value());
  CHECK(*report.min_lower_gap >= -1e-12);
}

TEST_CASE("instance files round-trip bit-identically") {
  const LogSumProblem logsum = generate_logsum_instance(6, 9, 3.0, std::nullopt, 17);
  std::stringstream s1;
  save_instance(s1, logsum);
  const LogSumProblem l2 = load_logsum_instance(s1);
  CHECK(l2.rows() == logsum.rows());
  CHECK(l2.targets() == logsum.targets());
  CHECK(l2.radius() == logsum.radius());
  CHECK(l2.lipschitz() == logsum.lipschitz());
  REQUIRE(l2.ground_truth().has_value());
  CHECK(*l2.ground_truth() == *logsum.ground_truth());

  const LogSumProblem bare(Matrix::Ones(1, 2), Vector::Ones(1), 1.0);
  std::stringstream s1b;
  save_instance(s1b, bare);
  CHECK_FALSE(load_logsum_instance(s1b).ground_truth().has_value());

  const QuadraticProblem quad = generate_quadratic_instance(5, 3.0, 1);
  std::stringstream s2;
  save_instance(s2, quad);
  const QuadraticProblem q2 = load_quadratic_instance(s2);
  CHECK(q2.op() == quad.op());
  CHECK(q2.offset() == quad.offset());

  const HolderFunction hold = generate_holder_instance(3, 0.3, 2);
  std::stringstream s3;
  save_instance(s3, hold);
  const HolderFunction h2 = load_holder_instance(s3);
  CHECK(h2.centers() == hold.centers());
  CHECK(h2.exponent() == hold.exponent());
  CHECK(h2.holder_constant() == hold.holder_constant());
}

TEST_CASE("malformed instance files are rejected") {
  std::stringstream wrong_kind;
  save_instance(wrong_kind, QuadraticProblem::identity(2));
  CHECK_THROWS_AS(load_logsum_instance(wrong_kind), std::invalid_argument);

  std::stringstream empty;
  CHECK_THROWS_AS(load_holder_instance(empty), std::invalid_argument);

  std::stringstream full;
  save_instance(full, generate_logsum_instance(4, 4, 1.0, std::nullopt, 0));
  const std::string text = full.str();
  std::stringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_logsum_instance(truncated), std::invalid_argument);

  std::stringstream garbage("ipg-instance quadratic 1\n2 2\nop\n1 x 0 1\n");
  CHECK_THROWS_AS(load_quadratic_instance(garbage), std::invalid_argument);

  std::stringstream version("ipg-instance holder 7\n");
  CHECK_THROWS_AS(load_holder_instance(version), std::invalid_argument);
}
