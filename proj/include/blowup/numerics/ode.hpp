#pragma once

// Dormand-Prince 5(4) integrator with PI step control and a cap event.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "blowup/errors.hpp"

namespace blowup {

using State = Eigen::VectorXd;

enum class Termination { cap_reached, endpoint, step_underflow };

/// Ordered samples of an IVP solution. `dy` holds the right-hand side at
/// each sample so that cubic Hermite interpolation is available.
struct Trajectory {
  std::vector<double> r;
  std::vector<State> y;
  std::vector<State> dy;
  Termination termination = Termination::endpoint;
  std::size_t rejected_steps = 0;

  std::size_t size() const { return r.size(); }
  const State& back() const { return y.back(); }

  /// Cubic Hermite interpolation of component `i` at `at`, which must lie
  /// within [r.front(), r.back()].
  double interpolate(double at, Eigen::Index i) const {
    auto it = std::upper_bound(r.begin(), r.end(), at);
    std::size_t k = it == r.begin() ? 0 : static_cast<std::size_t>(it - r.begin()) - 1;
    if (k + 1 >= r.size()) return y.back()(i);
    const double h = r[k + 1] - r[k];
    const double s = (at - r[k]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y[k](i) + h10 * h * dy[k](i) + h01 * y[k + 1](i) + h11 * h * dy[k + 1](i);
  }
};

struct IvpOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0: pick from the scale of r0 and the rhs
  double min_step_rel = 1e-15;
  std::size_t max_steps = 5'000'000;
  /// Disables step control: every step uses `initial_step`. Used for order
  /// verification.
  bool fixed_step = false;
};

using Rhs = std::function<State(double, const State&)>;
using CapPredicate = std::function<bool(double, const State&)>;

namespace detail {

struct DoPri {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

struct StepResult {
  State y;
  State dy;  // rhs at the new point (FSAL)
  State err;
};

inline StepResult dopri_step(const Rhs& f, double r, const State& y, const State& k1,
                             double h) {
  using C = DoPri;
  const State k2 = f(r + C::c2 * h, y + h * C::a21 * k1);
  const State k3 = f(r + C::c3 * h, y + h * (C::a31 * k1 + C::a32 * k2));
  const State k4 = f(r + C::c4 * h, y + h * (C::a41 * k1 + C::a42 * k2 + C::a43 * k3));
  const State k5 = f(r + C::c5 * h,
                     y + h * (C::a51 * k1 + C::a52 * k2 + C::a53 * k3 + C::a54 * k4));
  const State k6 = f(r + h, y + h * (C::a61 * k1 + C::a62 * k2 + C::a63 * k3 +
                                     C::a64 * k4 + C::a65 * k5));
  StepResult out;
  out.y = y + h * (C::b1 * k1 + C::b3 * k3 + C::b4 * k4 + C::b5 * k5 + C::b6 * k6);
  out.dy = f(r + h, out.y);
  out.err = h * (C::e1 * k1 + C::e3 * k3 + C::e4 * k4 + C::e5 * k5 + C::e6 * k6 +
                 C::e7 * out.dy);
  return out;
}

inline double error_norm(const State& err, const State& y0, const State& y1,
                         const IvpOptions& o) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double scale = o.atol + o.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    worst = std::max(worst, std::abs(err(i)) / scale);
  }
  return std::isfinite(worst) ? worst : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Integrates y' = rhs(r, y) from (r0, y0) towards r_end. If `cap` becomes
/// true the last step is bisected until the trigger point is located within
/// rtol * max(1, |r|); the first sample satisfying the cap ends the
/// trajectory. Step underflow is reported in the termination reason and the
/// partial trajectory is returned.
inline Trajectory integrate_ivp(const Rhs& rhs, const State& y0, double r0, double r_end,
                                const CapPredicate& cap, const IvpOptions& opts = {}) {
  Trajectory traj;
  traj.r.push_back(r0);
  traj.y.push_back(y0);
  State k1 = rhs(r0, y0);
  traj.dy.push_back(k1);
  if (cap && cap(r0, y0)) {
    traj.termination = Termination::cap_reached;
    return traj;
  }
  if (!(r_end > r0)) return traj;

  double h = opts.initial_step;
  if (h <= 0.0) {
    const double ynorm = y0.cwiseAbs().maxCoeff() + opts.atol;
    const double dnorm = k1.cwiseAbs().maxCoeff() + opts.atol;
    h = 0.01 * std::max(ynorm / dnorm, 1e-6 * std::max(1.0, std::abs(r0)));
    h = std::min(h, r_end - r0);
  }
  constexpr double kAlpha = 0.7 / 5.0, kBeta = 0.4 / 5.0, kSafety = 0.9;
  double err_prev = 1e-4;
  double r = r0;
  State y = y0;
  for (std::size_t step = 0; step < opts.max_steps; ++step) {
    const double h_min = opts.min_step_rel * std::max(1.0, std::abs(r));
    if (h < h_min) {
      traj.termination = Termination::step_underflow;
      return traj;
    }
    bool last = false;
    if (r + h >= r_end) {
      h = r_end - r;
      last = true;
    }
    detail::StepResult s = detail::dopri_step(rhs, r, y, k1, h);
    const double en = opts.fixed_step ? 0.0 : detail::error_norm(s.err, y, s.y, opts);
    if (en <= 1.0) {
      if (cap && cap(r + h, s.y)) {
        // Bisect the step length for the first point that triggers the cap.
        double lo = 0.0, hi = h;
        detail::StepResult hit = s;
        const double width = opts.rtol * std::max(1.0, std::abs(r));
        while (hi - lo > width) {
          const double mid = 0.5 * (lo + hi);
          if (!(mid > lo && mid < hi)) break;
          detail::StepResult trial = detail::dopri_step(rhs, r, y, k1, mid);
          if (cap(r + mid, trial.y)) {
            hi = mid;
            hit = trial;
          } else {
            lo = mid;
          }
        }
        traj.r.push_back(r + hi);
        traj.y.push_back(hit.y);
        traj.dy.push_back(hit.dy);
        traj.termination = Termination::cap_reached;
        return traj;
      }
      r = last ? r_end : r + h;
      y = s.y;
      k1 = s.dy;
      traj.r.push_back(r);
      traj.y.push_back(y);
      traj.dy.push_back(k1);
      if (last) {
        traj.termination = Termination::endpoint;
        return traj;
      }
      if (opts.fixed_step) continue;
      const double e = std::max(en, 1e-10);
      double factor = kSafety * std::pow(e, -kAlpha) * std::pow(err_prev, kBeta);
      factor = std::clamp(factor, 0.2, 5.0);
      h *= factor;
      err_prev = e;
    } else {
      ++traj.rejected_steps;
      double factor = std::isfinite(en) ? kSafety * std::pow(en, -1.0 / 5.0) : 0.1;
      h *= std::clamp(factor, 0.1, 0.9);
    }
  }
  throw NumericsError("IVP integrator exceeded its step budget");
}

}  // namespace blowup
