#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ipg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Raised when an iteration produces a non-finite or runaway objective.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by implied_subgradient when post_prox is not the prox of pre_prox.
class InconsistentProxError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Counter-based seed derivation. Streams keyed on (seed, a, b) are
// independent of how many other streams were drawn.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);
Rng make_rng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);

/// Uniform direction on the unit sphere scaled so that the norm is at most
/// `bound`: exactly `bound` with probability 1/2, bound * U(0,1) otherwise.
Vector bounded_perturbation(Eigen::Index dim, double bound, Rng& rng);

/// Uniform sample from the l1-ball of the given radius.
Vector sample_l1_ball(Eigen::Index dim, double radius, Rng& rng);

void require(bool condition, const std::string& message);

}  // namespace ipg
