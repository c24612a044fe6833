#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ipg/oracle.hpp"
#include "ipg/rates.hpp"
#include "ipg/types.hpp"
#include "support.hpp"

using namespace ipg;
using ipg::testing::loglog_slope;
using ipg::testing::logspace;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

CurveParams base_params() {
  return {{"L", 2.0}, {"rho", 1.5}, {"q", 1.0}, {"delta", 0.3}, {"gap", 1.2}, {"R", 1.5},
          {"beta", 0.5}, {"zeta", 0.2}, {"H", 1.0}, {"nu", 0.5}};
}

const CurveKind kAllKinds[] = {CurveKind::kThm2Nonconvex, CurveKind::kCor1Const,     CurveKind::kCor1FixedHorizon,
                               CurveKind::kConvexIpgm,    CurveKind::kConvexIpgmOptRho, CurveKind::kFipgm,
                               CurveKind::kFipgmOptRho,   CurveKind::kHolderRate};

}  // namespace

TEST_CASE("thm2 examples") {
  // q = 0, rho = L = 1, delta = 1/2, gap = 1, k = 3: 2 * 1 / 4 + 2 * 1 * 0.5 = 1.5, and
  // q = 1 lands on the same value (2 * 2 / 4 + 1 * 2 * 0.25).
  CHECK(bound_thm2(1.0, 1.0, 0.0, 0.5, 0.0, 0.0, 1.0, 3.0) == doctest::Approx(1.5));
  CHECK(bound_thm2(1.0, 1.0, 1.0, 0.5, 0.0, 0.0, 1.0, 3.0) == doctest::Approx(1.5));
  // delta = 0, zeta = 0: exact-oracle term only.
  CHECK(bound_thm2(3.0, 2.0, 1.0, 0.0, 0.4, 0.0, 1.5, 9.0) == doctest::Approx(2.0 * 5.0 * 1.5 / 10.0));
  CHECK_THROWS(bound_thm2(1, 1, 0, 0.5, 1.0, 0, 1, 3));
  CHECK_THROWS(bound_thm2(1, 1, 0, 0.5, 0, -0.1, 1, 3));
  CHECK_THROWS(bound_thm2(1, 0, 0, 0.5, 0, 0, 1, 3));
}

TEST_CASE("cor1 examples") {
  CHECK(bound_cor1_const(1.0, 1.0, 0.1, 1.0, 0.0) == doctest::Approx(4.02));
  CHECK(bound_cor1_const(2.0, 0.0, 0.0, 1.5, 4.0) == doctest::Approx(2.0 * 2.0 * 1.5 / 5.0));
  // q = 0 plateau is 2 L delta; with delta = 2 D Delta it is 4 D L Delta.
  const double D = 4.0, L = 128.0, noise = 0.1;
  CHECK(cor1_plateau(L, 0.0, 2.0 * D * noise) == doctest::Approx(4.0 * D * L * noise));
  CHECK(bound_cor1_const(L, 0.0, 2.0 * D * noise, 1.0, 1e12) == doctest::Approx(4.0 * D * L * noise).epsilon(1e-9));
  CHECK_THROWS(bound_cor1_const(1.0, 2.0, 0.1, 1.0, 0.0));
  CHECK_THROWS(bound_cor1_const(1.0, -0.5, 0.1, 1.0, 0.0));
}

TEST_CASE("thm2 with rho = L and beta = zeta = 0 equals cor1 on a random grid") {
  Rng rng = make_rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const double L = std::pow(10.0, 4.0 * u(rng) - 2.0), q = 1.99 * u(rng), delta = 3.0 * u(rng);
    const double gap = 10.0 * u(rng), k = std::floor(1e4 * u(rng));
    CHECK(rel(bound_thm2(L, L, q, delta, 0, 0, gap, k), bound_cor1_const(L, q, delta, gap, k)) <= 1e-10);
  }
}

TEST_CASE("fixed-horizon rho: example, substitution identity, delta -> 0") {
  CHECK(rho_opt_fixed_horizon(1.0, 1.0, 1.0, 0.5, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS(rho_opt_fixed_horizon(1.0, 0.5, 1.0, 0.5, 0.0));
  CHECK(rho_opt_fixed_horizon(2.0, 1.5, 0.0, 1.0, 10.0) == 0.0);
  CHECK(bound_cor1_fixed_horizon(2.0, 1.5, 0.0, 1.0, 10.0) == doctest::Approx(2.0 * 2.0 * 1.0 / 11.0));
  CHECK(bound_cor1_fixed_horizon(2.0, 1.5, 1e-12, 1.0, 10.0) == doctest::Approx(4.0 / 11.0).epsilon(1e-9));

  Rng rng = make_rng(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const double L = std::pow(10.0, 2.0 * u(rng) - 1.0), q = 1.0 + 0.99 * u(rng);
    const double delta = 0.01 + 2.0 * u(rng), gap = 0.1 + 5.0 * u(rng), k = std::floor(1e4 * u(rng));
    const double rho = rho_opt_fixed_horizon(L, q, delta, gap, k);
    CHECK(rel(bound_thm2(L, rho, q, delta, 0, 0, gap, k), bound_cor1_fixed_horizon(L, q, delta, gap, k)) <= 1e-10);
  }
}

TEST_CASE("fixed-horizon bound matches the two-term printed form at q = 1") {
  // At q = 1: 2 L gap/(k+1) + [sqrt(L) sqrt(2 gap) delta + delta sqrt(L) sqrt(2 gap)] / sqrt(k+1) + delta^2.
  const double L = 3.0, delta = 0.4, gap = 0.7, k = 20.0;
  const double s = std::sqrt(L * 2.0 * gap);
  const double printed = 2.0 * L * gap / (k + 1.0) + 2.0 * s * delta / std::sqrt(k + 1.0) + delta * delta;
  CHECK(bound_cor1_fixed_horizon(L, 1.0, delta, gap, k) == doctest::Approx(printed).epsilon(1e-12));
  // For q > 1 the form without the q factor undercuts the bound it stands for.
  const double q = 1.5;
  const double without_q = 2.0 * 0.5 + (1.0 + (2.0 - q)) * 1.0 + q * (2.0 - q);
  CHECK(without_q == doctest::Approx(3.25));
  CHECK(bound_cor1_fixed_horizon(1.0, q, 1.0, 0.5, 0.0) == doctest::Approx(3.75));
}

TEST_CASE("convex I-PGM examples") {
  CHECK(bound_convex_ipgm(1.0, 1.0, 0.2, 1.0, 4.0) == doctest::Approx(0.275));
  CHECK(bound_convex_ipgm(2.0, 0.0, 0.0, 3.0, 5.0, 1.0) == doctest::Approx(2.0 * 9.0 / 10.0));
  CHECK(bound_convex_ipgm(2.0, 0.0, 0.3, 3.0, 5.0) == doctest::Approx(1.8 + 0.3));
  CHECK_THROWS(bound_convex_ipgm(1.0, 1.0, 0.2, 1.0, 0.0));
  CHECK_THROWS(bound_convex_ipgm(1.0, 1.0, 0.2, 0.0, 4.0));
}

TEST_CASE("convex I-PGM: explicit form at the optimal rho never exceeds the closed form") {
  Rng rng = make_rng(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const double L = 0.1 + 5.0 * u(rng), q = 1.99 * u(rng), delta = 0.01 + u(rng), R = 0.1 + 3.0 * u(rng);
    const double k = 1.0 + std::floor(1e4 * u(rng));
    const double rho = delta * std::pow(k, (2.0 - q) / 2.0) / std::pow(R, 2.0 - q);
    CHECK(bound_convex_ipgm(L, q, delta, R, k, rho) <= bound_convex_ipgm(L, q, delta, R, k) * (1.0 + 1e-12));
  }
}

TEST_CASE("FI-PGM examples and the rho* identity") {
  CHECK(bound_fipgm(1.0, 1.0, 0.1, 1.0, 1.0) == doctest::Approx(4.0 / 6.0 + std::sqrt(8.0) * 4.0 * 0.1 / std::sqrt(24.0)));
  CHECK(bound_fipgm(1.0, 1.0, 0.1, 1.0, 1.0) == doctest::Approx(0.6667 + 0.2309).epsilon(1e-4));
  CHECK(bound_fipgm(2.0, 1.0, 0.0, 1.0, 3.0, 0.5) == doctest::Approx(4.0 * 2.5 / 20.0));
  // q = 0 accumulates linearly.
  CHECK(bound_fipgm(1.0, 0.0, 0.2, 1.0, 7.0) == doctest::Approx(4.0 / 72.0 + 10.0 * 0.2));
  CHECK_THROWS(bound_fipgm(1.0, 1.0, 0.1, 0.0, 1.0));

  Rng rng = make_rng(34);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const double L = 0.1 + 5.0 * u(rng), q = 0.01 + 1.98 * u(rng), delta = 0.01 + u(rng), R = 0.1 + 3.0 * u(rng);
    const double k = std::floor(1e4 * u(rng));
    const double triple = (k + 1.0) * (k + 2.0) * (k + 3.0);
    const double rho = std::pow(triple / (8.0 * R * R), (2.0 - q) / 2.0) * delta;
    CHECK(rel(bound_fipgm(L, q, delta, R, k, rho), bound_fipgm(L, q, delta, R, k)) <= 1e-10);
  }
}

TEST_CASE("FI-PGM delta-term exponent and its no-accumulation threshold") {
  CHECK(fipgm_delta_exponent(0.0) == 1.0);
  CHECK(fipgm_delta_exponent(2.0 / 3.0) == doctest::Approx(0.0));
  for (double q : {0.1, 0.5, 0.66}) CHECK(fipgm_delta_exponent(q) > 0.0);
  for (double q : {0.67, 1.0, 1.5}) CHECK(fipgm_delta_exponent(q) < 0.0);
  // The exponent matches the log-log slope of the delta-term.
  const auto ks = logspace(3.0, 5.0, 20);
  for (double q : {0.0, 0.5, 1.0, 1.5}) {
    std::vector<double> term;
    for (double k : ks) term.push_back(bound_fipgm(1.0, q, 0.1, 1.0, k) - bound_fipgm(1.0, q, 0.0, 1.0, k));
    CHECK(std::fabs(loglog_slope(ks, term) - fipgm_delta_exponent(q)) <= 0.02);
  }
}

TEST_CASE("Hoelder optimal delta: grid search, slope, smooth case") {
  const double H = 1.0, nu = 0.5, q = 0.0, gap = 1.0, k = 99.0;
  const HolderOptimum opt = holder_delta_opt(H, nu, q, gap, k);
  const double C = holder_coefficient(H, nu, q);
  const double c1 = 2.0 * (q + 1.0) * gap * C, c2 = (q + 1.0) * (2.0 - q) * std::pow(C, (2.0 - 2.0 * q) / (2.0 - q));
  const auto objective = [&](double d) {
    return c1 * std::pow(d, -(1.0 - nu) / (1.0 + nu - q)) / (k + 1.0) + c2 * std::pow(d, 2.0 * nu / (1.0 + nu - q));
  };
  double best = std::numeric_limits<double>::infinity(), arg = 0.0;
  for (double d : logspace(-8.0, 4.0, 10000)) {
    if (objective(d) < best) best = objective(d), arg = d;
  }
  CHECK(opt.bound == doctest::Approx(objective(opt.delta)).epsilon(1e-12));
  CHECK(opt.bound <= best * (1.0 + 1e-12));
  CHECK(opt.bound >= best * (1.0 - 1e-5));
  CHECK(opt.delta == doctest::Approx(arg).epsilon(0.01));

  for (double n2 : {0.25, 0.5, 0.75}) {
    const auto ks = logspace(2.0, 5.0, 30);
    std::vector<double> bounds;
    for (double kk : ks) bounds.push_back(holder_delta_opt(2.0, n2, 0.5, 1.0, kk).bound);
    CHECK(std::fabs(loglog_slope(ks, bounds) + 2.0 * n2 / (1.0 + n2)) <= 0.02);
  }

  const HolderOptimum smooth = holder_delta_opt(3.0, 1.0, 0.5, 2.0, 9.0);
  CHECK(smooth.delta == 0.0);
  CHECK(smooth.bound == doctest::Approx(2.0 * 1.5 * 2.0 * holder_coefficient(3.0, 1.0, 0.5) / 10.0));
  CHECK_THROWS(holder_delta_opt(1.0, 0.5, 1.5, 1.0, 9.0));
}

TEST_CASE("plateau is non-increasing in q when L / delta >= e") {
  Rng rng = make_rng(35);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const double L = std::pow(10.0, 3.0 * u(rng));
    const double delta = std::min(1.0, L / std::exp(1.0)) * (0.001 + 0.999 * u(rng));
    double prev = cor1_plateau(L, 0.0, delta);
    for (int i = 1; i < 200; ++i) {
      const double cur = cor1_plateau(L, 1.99 * i / 199.0, delta);
      CHECK(cur <= prev * (1.0 + 1e-12));
      prev = cur;
    }
  }
  // Below the threshold the ordering can flip: L = 1, delta = 1.
  CHECK(cor1_plateau(1.0, 0.0, 1.0) == doctest::Approx(2.0));
  CHECK(cor1_plateau(1.0, 0.5, 1.0) == doctest::Approx(2.25));
}

TEST_CASE("every curve is eventually non-increasing unless its delta-term grows") {
  const auto ks = logspace(0.0, 5.0, 400);
  const auto nonincreasing_tail = [&](CurveKind kind, const CurveParams& p) {
    // Tail: last half of the grid.
    for (std::size_t i = ks.size() / 2 + 1; i < ks.size(); ++i) {
      if (evaluate_curve(kind, p, ks[i]) > evaluate_curve(kind, p, ks[i - 1]) * (1.0 + 1e-12)) return false;
    }
    return true;
  };
  for (double q : {0.0, 0.5, 1.0, 1.5}) {
    CurveParams p = base_params();
    p["q"] = q;
    CHECK(nonincreasing_tail(CurveKind::kCor1Const, p));
    CHECK(nonincreasing_tail(CurveKind::kConvexIpgm, p));
    CHECK(nonincreasing_tail(CurveKind::kConvexIpgmOptRho, p));
    CHECK(nonincreasing_tail(CurveKind::kThm2Nonconvex, p));  // beta = 0.5 >= zeta = 0.2
    if (q < 1.0 + p["nu"]) CHECK(nonincreasing_tail(CurveKind::kHolderRate, p));
    if (q >= 1.0) CHECK(nonincreasing_tail(CurveKind::kCor1FixedHorizon, p));
    CHECK(nonincreasing_tail(CurveKind::kFipgmOptRho, p) == (q >= 2.0 / 3.0));
    CHECK_FALSE(nonincreasing_tail(CurveKind::kFipgm, p));
  }
  CurveParams growing = base_params();
  growing["beta"] = 0.1;
  growing["zeta"] = 0.5;
  CHECK_FALSE(nonincreasing_tail(CurveKind::kThm2Nonconvex, growing));
}

TEST_CASE("curves are positive and finite, and reduce to their rate term at delta = 0") {
  for (CurveKind kind : kAllKinds) {
    CurveParams p = base_params();
    if (kind == CurveKind::kCor1FixedHorizon) p["q"] = 1.5;
    for (double k : {1.0, 10.0, 1e3, 1e5}) {
      const double v = evaluate_curve(kind, p, k);
      CHECK(std::isfinite(v));
      CHECK(v > 0.0);
    }
  }
  CurveParams p = base_params();
  p["delta"] = 0.0;
  const double k = 7.0, L = p["L"], rho = p["rho"], q = p["q"], gap = p["gap"], R = p["R"], zeta = p["zeta"];
  CHECK(evaluate_curve(CurveKind::kThm2Nonconvex, p, k) ==
        doctest::Approx(2.0 * (L + q * rho) * gap / ((1.0 - zeta) * std::pow(k + 1.0, 1.0 - zeta))));
  CHECK(evaluate_curve(CurveKind::kCor1Const, p, k) == doctest::Approx(2.0 * (q + 1.0) * L * gap / (k + 1.0)));
  CHECK(evaluate_curve(CurveKind::kConvexIpgm, p, k) == doctest::Approx((L + q * rho) * R * R / (2.0 * k)));
  CHECK(evaluate_curve(CurveKind::kConvexIpgmOptRho, p, k) == doctest::Approx(L * R * R / (2.0 * k)));
  CHECK(evaluate_curve(CurveKind::kFipgm, p, k) ==
        doctest::Approx(4.0 * (L + q * rho) * R * R / ((k + 1.0) * (k + 2.0))));
  CHECK(evaluate_curve(CurveKind::kFipgmOptRho, p, k) == doctest::Approx(4.0 * L * R * R / ((k + 1.0) * (k + 2.0))));
}

TEST_CASE("curve names, parameters and CSV export") {
  for (CurveKind kind : kAllKinds) {
    const auto parsed = parse_curve_kind(to_string(kind));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
    for (const auto& name : required_params(kind)) {
      CurveParams p = base_params();
      if (kind == CurveKind::kCor1FixedHorizon) p["q"] = 1.5;
      p.erase(name);
      CHECK_THROWS_AS(evaluate_curve(kind, p, 3.0), std::invalid_argument);
    }
  }
  CHECK(to_string(CurveKind::kCor1Const) == "cor1_const");
  CHECK_FALSE(parse_curve_kind("nope").has_value());

  const BoundCurve curve = sample_curve(CurveKind::kCor1Const, base_params(), {0.0, 1.0, 2.0});
  REQUIRE(curve.samples.size() == 3);
  std::ostringstream out;
  write_curve_csv(out, curve);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,bound");
  for (const auto& [k, v] : curve.samples) {
    std::getline(in, line);
    const auto comma = line.find(',');
    CHECK(std::stod(line.substr(0, comma)) == k);
    CHECK(std::stod(line.substr(comma + 1)) == v);
  }
}
