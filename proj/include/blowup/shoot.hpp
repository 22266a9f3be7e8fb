#pragma once

// Radial shooting for u'' + (N-1)/r u' = f(u), u(0) = alpha, u'(0) = 0.
// Serves as an oracle independent of the fixed-point expansion.
//
// Alongside (u, v = u') the integrator carries g = F(u) - v^2/2 through
// g' = (N-1) v^2 / r, so g never suffers the cancellation of the direct
// difference. The blow-up radius is extrapolated from the last state as
//
//   R = r_stop + int_{u_stop}^inf dt / sqrt(2 (F(t) - g_stop)).

#include <optional>
#include <vector>

#include "blowup/expansion.hpp"
#include "blowup/nonlinearity.hpp"

namespace blowup {

struct ShootOptions {
  double u_cap = 1e6;     // stop once u reaches this value (>= 1e6)
  double tol = 1e-12;     // integrator rtol; atol is the same number
  double r_start = 1e-6;  // series start offset from the center
  double r_max = 1e6;     // give up on blow-up beyond this radius
};

enum class ShootStatus {
  blew_up,        // u reached u_cap (or F overflowed)
  partial,        // step underflow before the cap; R extrapolated anyway
  no_blowup,      // decayed below a, or r_max reached
};

const char* to_string(ShootStatus s);

struct ShootResult {
  double alpha = 0.0;
  int N = 1;
  std::vector<double> r, u, v, g;
  std::vector<double> dv;  // v' at each sample, for Hermite reconstruction
  double R_est = 0.0;      // +inf without blow-up
  double u_cap = 0.0;
  ShootStatus status = ShootStatus::no_blowup;

  std::size_t size() const { return r.size(); }
  /// u at radius `at` by monotone cubic Hermite interpolation of the
  /// samples; nullopt outside [r.front(), r.back()].
  std::optional<double> u_at(double at) const;
};

ShootResult shoot(const Nonlinearity& nl, int N, double alpha, const ShootOptions& opts = {});

/// Centre value alpha* whose blow-up radius is `target`. The bracket is
/// found by doubling/halving alpha - a at most 60 times (CalibrationError
/// otherwise) and refined by Brent until |R(alpha) - target| < tol.
double calibrate_alpha(const Nonlinearity& nl, int N, double target = 1.0, double tol = 1e-10,
                       const ShootOptions& opts = {});

struct DiagnosticRow {
  double u, g;
  double ratio;        // g / ((N-1) G(u)); NaN for N = 1
  double g_over_F;
};

/// Per sample: g and its ratio to (N-1) G with G(u) = int_base^u sqrt(2F).
std::vector<DiagnosticRow> diagnostics(const ShootResult& res, const Nonlinearity& nl,
                                       std::optional<double> base = std::nullopt);

struct ShootComparison {
  double d = 0.0;
  double u_shoot = 0.0;
  std::vector<double> u_k;         // one per profile
  std::vector<double> gap;         // u_shoot - u_k
  std::vector<double> normalized;  // |int_{u_k}^{u_shoot} dt/v0| / int_{u_k}^inf dt/v0
  double predicted_gap = 0.0;      // (N-1) Lambda(u_k of the first profile)
  bool flagged = false;            // 1 - d beyond the last sample
};

/// Rows per d of the shot solution against expansion profiles. `res` is
/// expected to be calibrated to blow up at r = 1.
std::vector<ShootComparison> compare_to_expansion(const ShootResult& res,
                                                  const std::vector<BlowupProfile>& profiles,
                                                  const std::vector<double>& d_grid,
                                                  std::optional<double> base = std::nullopt);

}  // namespace blowup
