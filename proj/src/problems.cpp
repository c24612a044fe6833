#include "ipg/problems.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

namespace ipg {

LogSumProblem::LogSumProblem(Matrix rows, Vector targets, double radius, std::optional<Vector> ground_truth)
    : rows_(std::move(rows)),
      targets_(std::move(targets)),
      radius_(radius),
      lipschitz_(rows_.squaredNorm()),
      ground_truth_(std::move(ground_truth)) {
  require(rows_.rows() >= 1 && rows_.cols() >= 1, "LogSumProblem: empty data");
  require(targets_.size() == rows_.rows(), "LogSumProblem: one target per row required");
  require(radius_ > 0.0, "LogSumProblem: radius must be positive");
  require(lipschitz_ > 0.0, "LogSumProblem: rows must not all vanish");
}

std::pair<double, Vector> LogSumProblem::evaluate(const Vector& x) const {
  require(x.size() == rows_.cols(), "LogSumProblem: dimension mismatch");
  const Vector r = rows_ * x - targets_;
  double value = 0.0;
  Vector weights(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double s = r[i] * r[i] + 1.0;
    value += std::log(s);
    weights[i] = 2.0 * r[i] / s;
  }
  return {value, rows_.transpose() * weights};
}

double LogSumProblem::value(const Vector& x) const {
  require(x.size() == rows_.cols(), "LogSumProblem: dimension mismatch");
  const Vector r = rows_ * x - targets_;
  double value = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) value += std::log1p(r[i] * r[i]);
  return value;
}

Vector LogSumProblem::gradient(const Vector& x) const { return evaluate(x).second; }

LogSumProblem generate_logsum_instance(Eigen::Index n, Eigen::Index num_terms, double radius,
                                       std::optional<double> noise_level, std::uint64_t seed) {
  require(n >= 1 && num_terms >= 1, "generate_logsum_instance: dimensions must be positive");
  require(radius > 0.0, "generate_logsum_instance: radius must be positive");
  require(!noise_level || *noise_level >= 0.0, "generate_logsum_instance: noise level must be nonnegative");

  Rng rng = make_rng(seed, 0x6c6f6773756dULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Matrix rows(num_terms, n);
  for (Eigen::Index i = 0; i < num_terms; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) rows(i, j) = normal(rng) * scale;
  }
  Vector truth = sample_l1_ball(n, radius, rng);
  Vector targets = rows * truth;
  const double sigma =
      noise_level ? *noise_level : 0.01 * targets.norm() / std::sqrt(static_cast<double>(num_terms));
  if (sigma > 0.0) {
    for (Eigen::Index i = 0; i < num_terms; ++i) targets[i] += sigma * normal(rng);
  }
  return LogSumProblem(std::move(rows), std::move(targets), radius, std::move(truth));
}

// ---------------------------------------------------------------------------

QuadraticProblem::QuadraticProblem(Matrix op, Vector offset) : op_(std::move(op)), offset_(std::move(offset)) {
  require(op_.rows() >= 1 && op_.cols() >= 1, "QuadraticProblem: empty operator");
  require(offset_.size() == op_.rows(), "QuadraticProblem: offset dimension mismatch");
  minimizer_ = op_.completeOrthogonalDecomposition().solve(offset_);
  optimal_value_ = value(minimizer_);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(op_.transpose() * op_, Eigen::EigenvaluesOnly);
  lipschitz_ = eig.eigenvalues().maxCoeff();
  require(lipschitz_ > 0.0, "QuadraticProblem: operator must be nonzero");
}

QuadraticProblem QuadraticProblem::identity(Eigen::Index n) {
  return QuadraticProblem(Matrix::Identity(n, n), Vector::Zero(n));
}

double QuadraticProblem::value(const Vector& x) const {
  require(x.size() == op_.cols(), "QuadraticProblem: dimension mismatch");
  return 0.5 * (op_ * x - offset_).squaredNorm();
}

Vector QuadraticProblem::gradient(const Vector& x) const {
  require(x.size() == op_.cols(), "QuadraticProblem: dimension mismatch");
  return op_.transpose() * (op_ * x - offset_);
}

QuadraticProblem generate_quadratic_instance(Eigen::Index n, double conditioning, std::uint64_t seed) {
  require(n >= 1, "generate_quadratic_instance: dimension must be positive");
  require(conditioning >= 1.0 && std::isfinite(conditioning),
          "generate_quadratic_instance: conditioning must be >= 1");
  Rng rng = make_rng(seed, 0x71756164ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index m = 2 * n;

  auto gaussian = [&](Eigen::Index r, Eigen::Index c) {
    Matrix g(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) g(i, j) = normal(rng);
    }
    return g;
  };
  const Matrix left_full = Eigen::HouseholderQR<Matrix>(gaussian(m, m)).householderQ();
  const Matrix right = Eigen::HouseholderQR<Matrix>(gaussian(n, n)).householderQ();
  const Matrix left = left_full.leftCols(n);

  Vector singular(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    singular[i] = std::pow(conditioning, -t);
  }
  const Matrix op = left * singular.asDiagonal() * right.transpose();

  Vector truth(n);
  for (Eigen::Index i = 0; i < n; ++i) truth[i] = normal(rng);
  // Residual in the orthogonal complement of range(A).
  Vector coeffs(m - n);
  for (Eigen::Index i = 0; i < m - n; ++i) coeffs[i] = normal(rng);
  const Vector residual = left_full.rightCols(m - n) * coeffs * 0.1;
  return QuadraticProblem(op, op * truth + residual);
}

// ---------------------------------------------------------------------------

double estimate_holder_constant(const HolderFunction& f, double box_half_width, std::size_t pairs,
                                std::uint64_t seed) {
  require(pairs > 0, "estimate_holder_constant: pairs must be positive");
  const Eigen::Index n = f.dimension();
  const double nu = f.exponent();
  Rng rng = make_rng(seed, 0x686f6c64ULL);
  std::uniform_real_distribution<double> coord(-box_half_width, box_half_width);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);

  double best = 0.0;
  Vector x(n), y(n);
  for (std::size_t s = 0; s < pairs; ++s) {
    switch (s % 3) {
      case 0:  // uniform pair in the box
        for (Eigen::Index i = 0; i < n; ++i) {
          x[i] = coord(rng);
          y[i] = coord(rng);
        }
        break;
      case 1:  // mirrored about the centers
        for (Eigen::Index i = 0; i < n; ++i) {
          x[i] = coord(rng);
          y[i] = 2.0 * f.centers()[i] - x[i];
        }
        break;
      default: {  // mirrored with equal offsets in every coordinate
        const double t = box_half_width * unif(rng);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double sign = coin(rng) ? 1.0 : -1.0;
          x[i] = f.centers()[i] + sign * t;
          y[i] = f.centers()[i] - sign * t;
        }
      }
    }
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    const double ratio = (f.gradient(x) - f.gradient(y)).norm() / std::pow(dist, nu);
    best = std::max(best, ratio);
  }
  return best;
}

HolderFunction generate_holder_instance(Eigen::Index n, double nu, std::uint64_t seed, double box_half_width) {
  require(n >= 1, "generate_holder_instance: dimension must be positive");
  require(nu > 0.0 && nu <= 1.0, "generate_holder_instance: nu must lie in (0, 1]");
  require(box_half_width > 0.0, "generate_holder_instance: box must be nonempty");
  Rng rng = make_rng(seed, 0x63656e74ULL);
  std::uniform_real_distribution<double> coord(-0.5 * box_half_width, 0.5 * box_half_width);
  Vector centers(n);
  for (Eigen::Index i = 0; i < n; ++i) centers[i] = coord(rng);
  if (nu == 1.0) return HolderFunction(1.0, 1.0, std::move(centers));

  const HolderFunction probe(nu, 1.0, centers);
  const double estimate = estimate_holder_constant(probe, box_half_width, 10000, seed);
  return HolderFunction(nu, 1.1 * estimate, std::move(centers));
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kFormatVersion = 1;

void write_header(std::ostream& out, const char* kind) {
  out << "ipg-instance " << kind << ' ' << kFormatVersion << '\n';
  out << std::setprecision(17);
}

void read_header(std::istream& in, const std::string& kind) {
  std::string magic, got_kind;
  int version = 0;
  in >> magic >> got_kind >> version;
  if (!in || magic != "ipg-instance" || got_kind != kind || version != kFormatVersion) {
    throw std::invalid_argument("instance file: expected header 'ipg-instance " + kind + " 1'");
  }
}

void expect_label(std::istream& in, const std::string& label) {
  std::string got;
  in >> got;
  if (!in || got != label) throw std::invalid_argument("instance file: expected '" + label + "'");
}

double read_value(std::istream& in) {
  double v = 0.0;
  in >> v;
  if (!in) throw std::invalid_argument("instance file: truncated or malformed value");
  return v;
}

void write_vector(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  out << '\n';
}

Vector read_vector(std::istream& in, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = read_value(in);
  return v;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) write_vector(out, m.row(i).transpose());
}

Matrix read_matrix(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = read_value(in);
  }
  return m;
}

Eigen::Index read_dim(std::istream& in) {
  long long d = 0;
  in >> d;
  if (!in || d < 1) throw std::invalid_argument("instance file: invalid dimension");
  return static_cast<Eigen::Index>(d);
}

}  // namespace

void save_instance(std::ostream& out, const LogSumProblem& problem) {
  write_header(out, "logsum");
  out << problem.dimension() << ' ' << problem.num_terms() << '\n';
  out << "radius " << problem.radius() << '\n';
  out << "rows\n";
  write_matrix(out, problem.rows());
  out << "targets\n";
  write_vector(out, problem.targets());
  if (problem.ground_truth()) {
    out << "truth\n";
    write_vector(out, *problem.ground_truth());
  }
}

LogSumProblem load_logsum_instance(std::istream& in) {
  read_header(in, "logsum");
  const Eigen::Index n = read_dim(in);
  const Eigen::Index terms = read_dim(in);
  expect_label(in, "radius");
  const double radius = read_value(in);
  expect_label(in, "rows");
  Matrix rows = read_matrix(in, terms, n);
  expect_label(in, "targets");
  Vector targets = read_vector(in, terms);
  std::optional<Vector> truth;
  std::string label;
  if (in >> label) {
    if (label != "truth") throw std::invalid_argument("instance file: unexpected section '" + label + "'");
    truth = read_vector(in, n);
  }
  return LogSumProblem(std::move(rows), std::move(targets), radius, std::move(truth));
}

void save_instance(std::ostream& out, const QuadraticProblem& problem) {
  write_header(out, "quadratic");
  out << problem.op().rows() << ' ' << problem.op().cols() << '\n';
  out << "op\n";
  write_matrix(out, problem.op());
  out << "offset\n";
  write_vector(out, problem.offset());
}

QuadraticProblem load_quadratic_instance(std::istream& in) {
  read_header(in, "quadratic");
  const Eigen::Index rows = read_dim(in);
  const Eigen::Index cols = read_dim(in);
  expect_label(in, "op");
  Matrix op = read_matrix(in, rows, cols);
  expect_label(in, "offset");
  Vector offset = read_vector(in, rows);
  return QuadraticProblem(std::move(op), std::move(offset));
}

void save_instance(std::ostream& out, const HolderFunction& problem) {
  write_header(out, "holder");
  out << problem.dimension() << '\n';
  out << "exponent " << problem.exponent() << '\n';
  out << "holder_constant " << problem.holder_constant() << '\n';
  out << "centers\n";
  write_vector(out, problem.centers());
}

HolderFunction load_holder_instance(std::istream& in) {
  read_header(in, "holder");
  const Eigen::Index n = read_dim(in);
  expect_label(in, "exponent");
  const double nu = read_value(in);
  expect_label(in, "holder_constant");
  const double h = read_value(in);
  expect_label(in, "centers");
  return HolderFunction(nu, h, read_vector(in, n));
}

}  // namespace ipg
