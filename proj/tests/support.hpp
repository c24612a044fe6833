// Independent reference computations shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "ipg/problems.hpp"
#include "ipg/types.hpp"

namespace ipg::testing {

/// Projection onto {||y||_1 <= R} by enumerating every face of the
/// cross-polytope: for each sign pattern s, project x onto the affine hull
/// {supp y = supp s, <s, y> = R} and keep the closest candidate that lands in
/// the face. Exponential in the dimension, so only for n <= 4 or so.
inline Vector kkt_l1_projection(const Vector& x, double radius) {
  if (x.lpNorm<1>() <= radius) return x;
  const Eigen::Index n = x.size();
  long patterns = 1;
  for (Eigen::Index i = 0; i < n; ++i) patterns *= 3;

  Vector best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (long code = 0; code < patterns; ++code) {
    Vector s(n);
    long c = code;
    int support = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      s[i] = static_cast<double>(c % 3) - 1.0;
      c /= 3;
      if (s[i] != 0.0) ++support;
    }
    if (support == 0) continue;
    // Minimize ||y - x||^2 over supp(y) = supp(s), <s, y> = R.
    const double shift = (s.dot(x) - radius) / support;
    Vector y = Vector::Zero(n);
    bool in_face = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (s[i] == 0.0) continue;
      y[i] = x[i] - shift * s[i];
      if (s[i] * y[i] < 0.0) in_face = false;
    }
    if (!in_face) continue;
    const double dist = (y - x).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = y;
    }
  }
  return best;
}

/// Smallest ||y - x||^2 over a uniform grid of the box [-R, R]^n restricted
/// to the l1-ball.
inline double grid_l1_projection_distance(const Vector& x, double radius, int points_per_axis) {
  const Eigen::Index n = x.size();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  double best = std::numeric_limits<double>::infinity();
  const double h = 2.0 * radius / (points_per_axis - 1);
  Vector y(n);
  while (true) {
    for (Eigen::Index i = 0; i < n; ++i) y[i] = -radius + h * idx[static_cast<std::size_t>(i)];
    if (y.lpNorm<1>() <= radius) best = std::min(best, (y - x).squaredNorm());
    Eigen::Index i = 0;
    while (i < n && ++idx[static_cast<std::size_t>(i)] == points_per_axis) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  return best;
}

inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                                 double step = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += step;
    b[i] -= step;
    g[i] = (f(a) - f(b)) / (2.0 * step);
  }
  return g;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::vector<double> logspace(double lo_exp, double hi_exp, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (count - 1)));
  return out;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// The canonical nonconvex instance: n = 64, N = 128, R = 4, seed 0.
inline const LogSumProblem& canonical_instance() {
  static const LogSumProblem problem = generate_logsum_instance(64, 128, 4.0, std::nullopt, 0);
  return problem;
}

/// 64 x 32 least-squares problem with L = 1 and singular values down to 0.1.
inline const QuadraticProblem& convex_instance() {
  static const QuadraticProblem problem = generate_quadratic_instance(32, 10.0, 7);
  return problem;
}

}  // namespace ipg::testing
