#include "ipg/types.hpp"

#include <cmath>

namespace ipg {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

Rng make_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return Rng(derive_seed(seed, a, b));
}

Vector bounded_perturbation(Eigen::Index dim, double bound, Rng& rng) {
  require(bound >= 0.0, "perturbation bound must be nonnegative");
  Vector e = Vector::Zero(dim);
  if (bound == 0.0 || dim == 0) return e;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double norm = 0.0;
  while (norm == 0.0) {
    for (Eigen::Index i = 0; i < dim; ++i) e[i] = normal(rng);
    norm = e.norm();
  }
  const bool on_boundary = unif(rng) < 0.5;
  const double radius = on_boundary ? bound : bound * unif(rng);
  e *= radius / norm;
  // Rounding can leave the norm one ulp above the bound.
  const double actual = e.norm();
  if (actual > bound) e *= bound / actual;
  return e;
}

Vector sample_l1_ball(Eigen::Index dim, double radius, Rng& rng) {
  require(radius > 0.0, "l1-ball radius must be positive");
  std::exponential_distribution<double> expo(1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  Vector x(dim);
  double total = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    x[i] = expo(rng);
    total += x[i];
  }
  total += expo(rng);
  for (Eigen::Index i = 0; i < dim; ++i) {
    x[i] = radius * x[i] / total * (coin(rng) ? 1.0 : -1.0);
  }
  return x;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace ipg
