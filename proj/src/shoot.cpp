#include "blowup/shoot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blowup/energy.hpp"
#include "blowup/errors.hpp"
#include "blowup/numerics/ode.hpp"
#include "blowup/numerics/quadrature.hpp"
#include "blowup/numerics/roots.hpp"

namespace blowup {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kFOverflow = 1e300;
constexpr double kTailTol = 1e-14;

double extrapolate_radius(const Nonlinearity& nl, double r, double u, double g) {
  auto integrand = [&nl, g](double t) {
    const double F = nl.F(t);
    if (std::isinf(F) || F > kFOverflow) return 0.0;
    const double gap = 2.0 * (F - g);
    if (!(gap > 0.0)) throw DomainError("F - g turned nonpositive beyond the last sample");
    return 1.0 / std::sqrt(gap);
  };
  return r + tail_integral(integrand, u, kTailTol, "blow-up radius tail");
}

}  // namespace

const char* to_string(ShootStatus s) {
  switch (s) {
    case ShootStatus::blew_up: return "blew_up";
    case ShootStatus::partial: return "partial";
    case ShootStatus::no_blowup: return "no_blowup";
  }
  return "?";
}

std::optional<double> ShootResult::u_at(double at) const {
  if (r.empty() || at < r.front() || at > r.back()) return std::nullopt;
  auto it = std::upper_bound(r.begin(), r.end(), at);
  std::size_t k = it == r.begin() ? 0 : static_cast<std::size_t>(it - r.begin()) - 1;
  if (k + 1 >= r.size()) return u.back();
  const double h = r[k + 1] - r[k];
  const double delta = (u[k + 1] - u[k]) / h;
  double m0 = v[k], m1 = v[k + 1];
  // Fritsch-Carlson limiter keeps the interpolant monotone.
  if (delta == 0.0) {
    m0 = m1 = 0.0;
  } else {
    const double a = m0 / delta, b = m1 / delta;
    if (a < 0.0) m0 = 0.0;
    if (b < 0.0) m1 = 0.0;
    const double s2 = a * a + b * b;
    if (s2 > 9.0) {
      const double tau = 3.0 / std::sqrt(s2);
      m0 = tau * a * delta;
      m1 = tau * b * delta;
    }
  }
  const double s = (at - r[k]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * u[k] + h10 * h * m0 + h01 * u[k + 1] + h11 * h * m1;
}

ShootResult shoot(const Nonlinearity& nl, int N, double alpha, const ShootOptions& opts) {
  if (N < 1) throw DomainError("dimension N must be at least 1");
  if (!(alpha > nl.threshold())) {
    std::ostringstream os;
    os << "shooting needs alpha > a = " << nl.threshold() << ", got " << alpha;
    throw DomainError(os.str());
  }
  if (!(opts.u_cap >= 1e6)) throw DomainError("u_cap must be at least 1e6");
  if (!(alpha < opts.u_cap)) throw DomainError("alpha must lie below u_cap");
  if (!(opts.tol > 0.0) || !(opts.r_start > 0.0)) {
    throw DomainError("shooting needs positive tol and r_start");
  }
  const double a = nl.threshold();
  const double Nm1 = N - 1.0;

  // State (u, v, g) with g' = (N-1) v^2 / r.
  Rhs rhs = [&nl, Nm1](double r, const State& y) {
    State dy(3);
    dy(0) = y(1);
    dy(1) = nl.f(y(0)) - Nm1 * y(1) / r;
    dy(2) = Nm1 * y(1) * y(1) / r;
    return dy;
  };
  bool decayed = false;
  CapPredicate cap = [&](double, const State& y) {
    if (y(1) < 0.0 && y(0) < a) {
      decayed = true;
      return true;
    }
    return y(0) >= opts.u_cap || !(nl.F(y(0)) <= kFOverflow);
  };

  const double r0 = opts.r_start;
  const double fa = nl.f(alpha);
  State y0(3);
  y0(0) = alpha + fa * r0 * r0 / (2.0 * N);
  y0(1) = fa * r0 / N;
  y0(2) = nl.F(y0(0)) - 0.5 * y0(1) * y0(1);

  IvpOptions io;
  io.rtol = opts.tol;
  io.atol = opts.tol;
  Trajectory tr = integrate_ivp(rhs, y0, r0, opts.r_max, cap, io);

  ShootResult res;
  res.alpha = alpha;
  res.N = N;
  res.u_cap = opts.u_cap;
  const std::size_t n = tr.size();
  res.r = tr.r;
  res.u.resize(n);
  res.v.resize(n);
  res.g.resize(n);
  res.dv.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.u[i] = tr.y[i](0);
    res.v[i] = tr.y[i](1);
    res.g[i] = tr.y[i](2);
    res.dv[i] = tr.dy[i](1);
  }

  if (decayed || tr.termination == Termination::endpoint) {
    res.status = ShootStatus::no_blowup;
    res.R_est = kInf;
    return res;
  }
  res.status = tr.termination == Termination::cap_reached ? ShootStatus::blew_up
                                                           : ShootStatus::partial;
  try {
    res.R_est = extrapolate_radius(nl, res.r.back(), res.u.back(), res.g.back());
  } catch (const NumericsError&) {
    // Large u without a convergent tail: growth, not blow-up.
    res.status = ShootStatus::no_blowup;
    res.R_est = kInf;
  }
  return res;
}

double calibrate_alpha(const Nonlinearity& nl, int N, double target, double tol,
                       const ShootOptions& opts) {
  if (!(target > 0.0) || !(tol > 0.0)) throw DomainError("calibration needs target, tol > 0");
  const double a = nl.threshold();
  auto radius = [&](double alpha) { return shoot(nl, N, alpha, opts).R_est; };

  // R decreases in alpha; find alpha_lo with R > target and alpha_hi with R < target.
  double lo = a + 1.0, hi = lo;
  double R = radius(lo);
  int tries = 0;
  if (R > target) {
    while (R > target) {
      if (++tries > 60) throw CalibrationError("no alpha with R(alpha) < target after 60 doublings");
      lo = hi;
      hi = a + 2.0 * (hi - a);
      if (!(hi < opts.u_cap)) {
        throw CalibrationError("alpha reached u_cap without R(alpha) < target");
      }
      R = radius(hi);
    }
  } else {
    while (!(R > target)) {
      if (++tries > 60) throw CalibrationError("no alpha with R(alpha) > target after 60 halvings");
      hi = lo;
      lo = a + 0.5 * (lo - a);
      R = radius(lo);
    }
  }
  if (std::abs(R - target) < tol) return R > target ? lo : hi;

  auto h = [&](double alpha) {
    const double Ra = radius(alpha);
    if (std::abs(Ra - target) < tol) return 0.0;
    // log keeps the no-blow-up side (R = inf) finite for the root finder.
    return std::min(std::log(Ra / target), 50.0);
  };
  const double alpha = find_root_monotone(h, lo, hi, 0.0);
  const double R_final = radius(alpha);
  if (!(std::abs(R_final - target) < 10.0 * tol)) {
    std::ostringstream os;
    os << "calibration stalled at alpha = " << alpha << " with R - target = "
       << R_final - target << " (integrator tolerance too loose for tol = " << tol << ")";
    throw CalibrationError(os.str());
  }
  return alpha;
}

std::vector<DiagnosticRow> diagnostics(const ShootResult& res, const Nonlinearity& nl,
                                       std::optional<double> base) {
  std::vector<DiagnosticRow> rows;
  rows.reserve(res.size());
  std::optional<EnergyIntegrals> E;
  if (res.N >= 2) E.emplace(nl, base);
  for (std::size_t i = 0; i < res.size(); ++i) {
    DiagnosticRow row{res.u[i], res.g[i], kNaN, kNaN};
    const double F = nl.F(res.u[i]);
    if (F > 0.0 && std::isfinite(F)) row.g_over_F = res.g[i] / F;
    if (E && res.u[i] > E->base()) {
      const double G = E->G(res.u[i]);
      if (G > 0.0) row.ratio = res.g[i] / ((res.N - 1) * G);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ShootComparison> compare_to_expansion(const ShootResult& res,
                                                  const std::vector<BlowupProfile>& profiles,
                                                  const std::vector<double>& d_grid,
                                                  std::optional<double> base) {
  if (profiles.empty()) throw DomainError("compare_to_expansion needs at least one profile");
  const Nonlinearity& nl = profiles.front().velocity().nonlinearity();
  auto inv_v0 = [&nl](double t) {
    const double F = nl.F(t);
    return std::isinf(F) ? 0.0 : 1.0 / std::sqrt(2.0 * F);
  };
  const BlowupProfile* leading = nullptr;
  for (const auto& p : profiles) {
    if (p.k() == 0) leading = &p;
  }
  std::optional<EnergyIntegrals> E;
  if (leading) E.emplace(nl, base);

  std::vector<ShootComparison> rows;
  rows.reserve(d_grid.size());
  for (double d : d_grid) {
    ShootComparison row;
    row.d = d;
    auto us = res.u_at(1.0 - d);
    row.flagged = !us.has_value();
    row.u_shoot = us.value_or(kNaN);
    for (const auto& p : profiles) {
      const double uk = p(d);
      row.u_k.push_back(uk);
      row.gap.push_back(row.u_shoot - uk);
      if (row.flagged) {
        row.normalized.push_back(kNaN);
      } else {
        const double num = std::abs(definite_integral(inv_v0, uk, row.u_shoot, 1e-12, "shoot gap"));
        row.normalized.push_back(num / tail_integral(inv_v0, uk, 1e-12, "profile tail"));
      }
    }
    row.predicted_gap = leading ? (res.N - 1) * E->lambda((*leading)(d)) : kNaN;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace blowup
