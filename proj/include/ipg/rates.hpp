#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ipg {

// Closed-form bounds. `k` is a real >= 0 (or >= 1 where noted) so curves can
// be sampled smoothly; `gap` is Delta_0 = f(x0) - f_inf.

/// min_{j<=k} ||g_j + p_{j+1}||^2 bound for the decaying schedules.
double bound_thm2(double L, double rho, double q, double delta, double beta, double zeta, double gap, double k);

/// Constant schedule with rho = L.
double bound_cor1_const(double L, double q, double delta, double gap, double k);
/// k -> infinity limit of bound_cor1_const.
double cor1_plateau(double L, double q, double delta);

/// rho minimizing the constant-schedule bound at a fixed horizon, q in [1, 2).
/// delta = 0 gives 0 (the limit).
double rho_opt_fixed_horizon(double L, double q, double delta, double gap, double horizon);
/// bound_thm2(beta = zeta = 0) evaluated at rho_opt_fixed_horizon(..., k).
double bound_cor1_fixed_horizon(double L, double q, double delta, double gap, double k);

/// f(x_hat_k) - f* for I-PGM on convex problems, k >= 1. Without rho the
/// optimal-rho closed form LR^2/(2k) + delta (2+q) R^q / (2 k^{q/2}).
double bound_convex_ipgm(double L, double q, double delta, double R, double k,
                         std::optional<double> rho = std::nullopt);

/// f(y_k) - f* for FI-PGM. Without rho the rho* closed form.
double bound_fipgm(double L, double q, double delta, double R, double k, std::optional<double> rho = std::nullopt);

/// Exponent of k in the delta-term of the rho* FI-PGM bound: 1 - 3q/2.
double fipgm_delta_exponent(double q);

struct HolderOptimum {
  double delta = 0.0;
  double bound = 0.0;
};

/// Per-horizon delta minimizing
///   C1 delta^{-(1-nu)/(1+nu-q)} / (k+1) + C2 delta^{2 nu/(1+nu-q)}
/// with C1 = 2(q+1) gap C, C2 = (q+1)(2-q) C^{(2-2q)/(2-q)}, C the Hoelder
/// smoothing coefficient. nu = 1 returns delta = 0 and C1/(k+1).
HolderOptimum holder_delta_opt(double holder_constant, double nu, double q, double gap, double k);

enum class CurveKind {
  kThm2Nonconvex,
  kCor1Const,
  kCor1FixedHorizon,
  kConvexIpgm,
  kConvexIpgmOptRho,
  kFipgm,
  kFipgmOptRho,
  kHolderRate,
};

std::string to_string(CurveKind kind);
std::optional<CurveKind> parse_curve_kind(const std::string& name);

/// Parameter names: L, rho, q, delta, gap, R, beta, zeta, H, nu.
using CurveParams = std::map<std::string, double>;

struct BoundCurve {
  CurveKind kind = CurveKind::kCor1Const;
  CurveParams params;
  std::vector<std::pair<double, double>> samples;
};

/// Parameters each kind reads; missing ones are a validation error.
std::vector<std::string> required_params(CurveKind kind);
double evaluate_curve(CurveKind kind, const CurveParams& params, double k);
BoundCurve sample_curve(CurveKind kind, const CurveParams& params, const std::vector<double>& ks);
void write_curve_csv(std::ostream& out, const BoundCurve& curve);

}  // namespace ipg
