#include "ipg/rates.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "ipg/oracle.hpp"
#include "ipg/types.hpp"

namespace ipg {

namespace {

void check_degree(double q) { require(q >= 0.0 && q < 2.0, "rates: q must lie in [0, 2)"); }
void check_positive(double v, const char* what) {
  require(v > 0.0 && std::isfinite(v), std::string("rates: ") + what + " must be positive");
}
void check_nonnegative(double v, const char* what) {
  require(v >= 0.0 && std::isfinite(v), std::string("rates: ") + what + " must be nonnegative");
}

// (2-q) delta^{2/(2-q)} / (2 rho^{q/(2-q)}): the AM-GM constant.
double amgm_constant(double q, double delta, double rho) {
  return (2.0 - q) * std::pow(delta, 2.0 / (2.0 - q)) / (2.0 * std::pow(rho, q / (2.0 - q)));
}

}  // namespace

double bound_thm2(double L, double rho, double q, double delta, double beta, double zeta, double gap, double k) {
  check_positive(L, "L");
  check_positive(rho, "rho");
  check_degree(q);
  check_nonnegative(delta, "delta");
  check_nonnegative(gap, "gap");
  check_nonnegative(k, "k");
  require(beta >= 0.0 && beta < 1.0, "rates: beta must lie in [0, 1)");
  require(zeta >= 0.0 && zeta < 1.0, "rates: zeta must lie in [0, 1)");
  const double m = L + q * rho;
  const double rate = 2.0 * m * gap / ((1.0 - zeta) * std::pow(k + 1.0, 1.0 - zeta));
  const double noise = (2.0 - q) * m * std::pow(delta, 2.0 / (2.0 - q)) /
                       ((1.0 - zeta) * (1.0 - beta) * std::pow(rho, q / (2.0 - q)) * std::pow(k + 1.0, beta - zeta));
  return rate + noise;
}

double cor1_plateau(double L, double q, double delta) {
  check_positive(L, "L");
  check_degree(q);
  check_nonnegative(delta, "delta");
  return (q + 1.0) * (2.0 - q) * std::pow(L, (2.0 - 2.0 * q) / (2.0 - q)) * std::pow(delta, 2.0 / (2.0 - q));
}

double bound_cor1_const(double L, double q, double delta, double gap, double k) {
  check_nonnegative(gap, "gap");
  check_nonnegative(k, "k");
  return 2.0 * (q + 1.0) * L * gap / (k + 1.0) + cor1_plateau(L, q, delta);
}

double rho_opt_fixed_horizon(double L, double q, double delta, double gap, double horizon) {
  check_positive(L, "L");
  require(q >= 1.0 && q < 2.0, "rho_opt_fixed_horizon: q must lie in [1, 2)");
  check_nonnegative(delta, "delta");
  check_positive(gap, "gap");
  check_nonnegative(horizon, "horizon");
  const double e = (2.0 - q) / 2.0;
  return std::pow(L, e) * delta * std::pow(horizon + 1.0, e) / std::pow(2.0 * gap, e);
}

double bound_cor1_fixed_horizon(double L, double q, double delta, double gap, double k) {
  // Validates through rho_opt_fixed_horizon.
  rho_opt_fixed_horizon(L, q, delta, gap, k);
  const double two_gap = 2.0 * gap;
  const double middle = (q * std::pow(L, (2.0 - q) / 2.0) + (2.0 - q) * std::pow(L, 1.0 - q / 2.0)) *
                        std::pow(two_gap, q / 2.0) * delta / std::pow(k + 1.0, q / 2.0);
  const double last = q * (2.0 - q) * delta * delta * std::pow(L, 1.0 - q) * std::pow(two_gap, q - 1.0) /
                      std::pow(k + 1.0, q - 1.0);
  return 2.0 * L * gap / (k + 1.0) + middle + last;
}

double bound_convex_ipgm(double L, double q, double delta, double R, double k, std::optional<double> rho) {
  check_positive(L, "L");
  check_degree(q);
  check_nonnegative(delta, "delta");
  check_positive(R, "R");
  require(k >= 1.0, "bound_convex_ipgm: k must be >= 1");
  if (rho) {
    check_positive(*rho, "rho");
    return (L + q * *rho) * R * R / (2.0 * k) + amgm_constant(q, delta, *rho);
  }
  return L * R * R / (2.0 * k) + delta * (2.0 + q) * std::pow(R, q) / (2.0 * std::pow(k, q / 2.0));
}

double bound_fipgm(double L, double q, double delta, double R, double k, std::optional<double> rho) {
  check_positive(L, "L");
  check_degree(q);
  check_nonnegative(delta, "delta");
  check_positive(R, "R");
  check_nonnegative(k, "k");
  const double pair = (k + 1.0) * (k + 2.0);
  if (rho) {
    check_positive(*rho, "rho");
    return 4.0 * (L + q * *rho) * R * R / pair + (k + 3.0) * amgm_constant(q, delta, *rho);
  }
  const double triple = pair * (k + 3.0);
  return 4.0 * L * R * R / pair + std::pow(8.0, q / 2.0) * std::pow(R, q) * (k + 3.0) * delta / std::pow(triple, q / 2.0);
}

double fipgm_delta_exponent(double q) {
  check_degree(q);
  return 1.0 - 1.5 * q;
}

HolderOptimum holder_delta_opt(double holder_constant, double nu, double q, double gap, double k) {
  require(nu > 0.0 && nu <= 1.0, "holder_delta_opt: nu must lie in (0, 1]");
  require(q < 1.0 + nu, "holder_delta_opt: q must be < 1 + nu");
  check_nonnegative(gap, "gap");
  check_nonnegative(k, "k");
  const double c = holder_coefficient(holder_constant, nu, q);
  const double c1 = 2.0 * (q + 1.0) * gap * c;
  if (nu == 1.0) return {0.0, c1 / (k + 1.0)};

  const double c2 = (q + 1.0) * (2.0 - q) * std::pow(c, (2.0 - 2.0 * q) / (2.0 - q));
  const double a = (1.0 - nu) / (1.0 + nu - q);
  const double b = 2.0 * nu / (1.0 + nu - q);
  HolderOptimum out;
  out.delta = std::pow(a * c1 / (b * c2 * (k + 1.0)), (1.0 + nu - q) / (1.0 + nu));
  out.bound = c1 * std::pow(out.delta, -a) / (k + 1.0) + c2 * std::pow(out.delta, b);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct KindName {
  CurveKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {CurveKind::kThm2Nonconvex, "thm2_nonconvex"},
    {CurveKind::kCor1Const, "cor1_const"},
    {CurveKind::kCor1FixedHorizon, "cor1_fixed_horizon"},
    {CurveKind::kConvexIpgm, "convex_ipgm"},
    {CurveKind::kConvexIpgmOptRho, "convex_ipgm_opt_rho"},
    {CurveKind::kFipgm, "fipgm"},
    {CurveKind::kFipgmOptRho, "fipgm_opt_rho"},
    {CurveKind::kHolderRate, "holder_rate"},
};

double param(const CurveParams& params, const std::string& name) {
  const auto it = params.find(name);
  if (it == params.end()) throw std::invalid_argument("bound curve: missing parameter '" + name + "'");
  return it->second;
}

}  // namespace

std::string to_string(CurveKind kind) {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

std::optional<CurveKind> parse_curve_kind(const std::string& name) {
  for (const auto& entry : kKindNames) {
    if (name == entry.name) return entry.kind;
  }
  return std::nullopt;
}

std::vector<std::string> required_params(CurveKind kind) {
  switch (kind) {
    case CurveKind::kThm2Nonconvex:
      return {"L", "rho", "q", "delta", "beta", "zeta", "gap"};
    case CurveKind::kCor1Const:
    case CurveKind::kCor1FixedHorizon:
      return {"L", "q", "delta", "gap"};
    case CurveKind::kConvexIpgm:
    case CurveKind::kFipgm:
      return {"L", "q", "delta", "R", "rho"};
    case CurveKind::kConvexIpgmOptRho:
    case CurveKind::kFipgmOptRho:
      return {"L", "q", "delta", "R"};
    case CurveKind::kHolderRate:
      return {"H", "nu", "q", "gap"};
  }
  return {};
}

double evaluate_curve(CurveKind kind, const CurveParams& p, double k) {
  switch (kind) {
    case CurveKind::kThm2Nonconvex:
      return bound_thm2(param(p, "L"), param(p, "rho"), param(p, "q"), param(p, "delta"), param(p, "beta"),
                        param(p, "zeta"), param(p, "gap"), k);
    case CurveKind::kCor1Const:
      return bound_cor1_const(param(p, "L"), param(p, "q"), param(p, "delta"), param(p, "gap"), k);
    case CurveKind::kCor1FixedHorizon:
      return bound_cor1_fixed_horizon(param(p, "L"), param(p, "q"), param(p, "delta"), param(p, "gap"), k);
    case CurveKind::kConvexIpgm:
      return bound_convex_ipgm(param(p, "L"), param(p, "q"), param(p, "delta"), param(p, "R"), k, param(p, "rho"));
    case CurveKind::kConvexIpgmOptRho:
      return bound_convex_ipgm(param(p, "L"), param(p, "q"), param(p, "delta"), param(p, "R"), k);
    case CurveKind::kFipgm:
      return bound_fipgm(param(p, "L"), param(p, "q"), param(p, "delta"), param(p, "R"), k, param(p, "rho"));
    case CurveKind::kFipgmOptRho:
      return bound_fipgm(param(p, "L"), param(p, "q"), param(p, "delta"), param(p, "R"), k);
    case CurveKind::kHolderRate:
      return holder_delta_opt(param(p, "H"), param(p, "nu"), param(p, "q"), param(p, "gap"), k).bound;
  }
  throw std::invalid_argument("bound curve: unknown kind");
}

BoundCurve sample_curve(CurveKind kind, const CurveParams& params, const std::vector<double>& ks) {
  BoundCurve curve{kind, params, {}};
  curve.samples.reserve(ks.size());
  for (double k : ks) curve.samples.emplace_back(k, evaluate_curve(kind, params, k));
  return curve;
}

void write_curve_csv(std::ostream& out, const BoundCurve& curve) {
  const auto old_precision = out.precision(17);
  out << "k,bound\n";
  for (const auto& [k, v] : curve.samples) out << k << ',' << v << '\n';
  out.precision(old_precision);
}

}  // namespace ipg
