#pragma once

// Adaptive Gauss-Kronrod quadrature on finite intervals and doubling-panel
// summation for integrals over [lo, +inf).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "blowup/errors.hpp"

namespace blowup {

enum class TailStatus { converged, diverges, inconclusive };

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  double cutoff_used = 0.0;  // improper integrals only
  TailStatus status = TailStatus::inconclusive;
  std::size_t panels = 0;
};

struct QuadratureOptions {
  std::size_t max_panels = std::size_t{1} << 20;
};

struct TailOptions {
  /// Consecutive non-decaying doubling panels before declaring divergence.
  int max_stalled = 20;
  /// Hard cap on doubling panels; reaching it without a verdict is
  /// inconclusive.
  int max_panels = 400;
  /// Panel-over-panel ratio counted as decay.
  double decay_ratio = 0.95;
};

namespace detail {

// 21-point Kronrod rule with its embedded 10-point Gauss rule.
inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980029692, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, error, abs_value;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename G>
Panel gauss_kronrod21(const G& g, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = g(center);
  double kronrod = fc * kWgk[10];
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = g(center - dx);
    const double f2 = g(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    abs_sum += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  // Error floored at the roundoff level of the panel, as QUADPACK does.
  const double abs_value = abs_sum * std::abs(half);
  const double err = std::max(std::abs((kronrod - gauss) * half),
                              50.0 * std::numeric_limits<double>::epsilon() * abs_value);
  Panel p{a, b, kronrod * half, err, abs_value};
  if (!std::isfinite(p.value) || !std::isfinite(p.error)) {
    std::ostringstream os;
    os << "non-finite integrand on [" << a << ", " << b << "]";
    throw NumericsError(os.str());
  }
  return p;
}

}  // namespace detail

/// Adaptive bisection with the 21-point Gauss-Kronrod rule. The panel with
/// the largest error is split until the summed error estimate drops below
/// `tol` relative to the value (or to the roundoff floor of the absolute
/// integral). Reversed limits integrate with a sign flip.
template <typename G>
QuadratureResult integrate_adaptive(const G& g, double lo, double hi, double tol,
                                    const QuadratureOptions& opts = {}) {
  QuadratureResult out;
  if (lo == hi) {
    out.converged = true;
    out.status = TailStatus::converged;
    return out;
  }
  if (hi < lo) {
    out = integrate_adaptive(g, hi, lo, tol, opts);
    out.value = -out.value;
    return out;
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::priority_queue<detail::Panel> heap;
  detail::Panel first = detail::gauss_kronrod21(g, lo, hi);
  double value = first.value;
  double error = first.error;
  double abs_value = first.abs_value;
  heap.push(first);
  std::size_t panels = 1;
  auto done = [&] {
    return error <= std::max(tol * std::abs(value), 50.0 * eps * abs_value * 1.000001);
  };
  while (!done()) {
    if (panels >= opts.max_panels) break;
    detail::Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    heap.pop();
    detail::Panel left = detail::gauss_kronrod21(g, worst.a, mid);
    detail::Panel right = detail::gauss_kronrod21(g, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    abs_value += left.abs_value + right.abs_value - worst.abs_value;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed the drift of incremental updates.
  value = 0.0;
  error = 0.0;
  abs_value = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    abs_value += heap.top().abs_value;
    heap.pop();
  }
  out.value = value;
  out.error_estimate = error;
  out.converged = done();
  out.status = out.converged ? TailStatus::converged : TailStatus::inconclusive;
  out.panels = panels;
  return out;
}

/// Integral over [lo, +inf) as a sum of doubling panels [L, 2L] (or
/// [lo + 2^j - 1, lo + 2^(j+1) - 1] when lo <= 0). Converges once the last
/// three panel contributions decay geometrically and the extrapolated
/// remainder falls below `tol` relative to the accumulated value; the
/// extrapolated remainder is included in the value.
template <typename G>
QuadratureResult integrate_to_infinity(const G& g, double lo, double tol,
                                       const TailOptions& opts = {}) {
  QuadratureResult out;
  auto edge = [lo](int j) {
    return lo > 0.0 ? std::ldexp(lo, j) : lo + (std::ldexp(1.0, j) - 1.0);
  };
  double acc = 0.0;
  double err = 0.0;
  std::vector<double> contrib;
  int stalled = 0;
  int good = 0;
  int sign_flips = 0;
  double remainder = 0.0;
  const double panel_tol = std::max(tol * 0.1, 1e-15);
  for (int j = 0; j < opts.max_panels; ++j) {
    const double a = edge(j);
    const double b = edge(j + 1);
    if (!std::isfinite(b)) break;
    QuadratureResult piece = integrate_adaptive(g, a, b, panel_tol);
    if (!piece.converged) {
      out.value = acc;
      out.error_estimate = err;
      out.cutoff_used = a;
      out.status = TailStatus::inconclusive;
      return out;
    }
    const double c = piece.value;
    acc += c;
    err += piece.error_estimate;
    out.cutoff_used = b;
    out.panels = static_cast<std::size_t>(j) + 1;
    if (!contrib.empty()) {
      const double prev = contrib.back();
      if (c * prev < 0.0 && std::abs(c) > tol * std::abs(acc)) {
        if (++sign_flips >= 2) {
          out.value = acc;
          out.error_estimate = err;
          out.status = TailStatus::inconclusive;
          return out;
        }
      }
      double ratio;
      if (prev == 0.0) {
        ratio = c == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      } else {
        ratio = std::abs(c / prev);
      }
      if (ratio <= opts.decay_ratio) {
        stalled = 0;
        remainder = std::abs(c) * ratio / (1.0 - ratio);
        if (c < 0.0) remainder = -remainder;
        if (std::abs(c) <= tol * std::abs(acc) &&
            std::abs(remainder) <= tol * std::abs(acc)) {
          ++good;
        } else if (acc == 0.0 && c == 0.0) {
          ++good;
        } else {
          good = 0;
        }
      } else {
        good = 0;
        if (++stalled >= opts.max_stalled) {
          out.value = acc;
          out.error_estimate = err;
          out.status = TailStatus::diverges;
          return out;
        }
      }
      if (good >= 3) {
        out.value = acc + remainder;
        out.error_estimate = err + std::abs(remainder);
        out.converged = true;
        out.status = TailStatus::converged;
        return out;
      }
    }
    contrib.push_back(c);
  }
  out.value = acc;
  out.error_estimate = err;
  out.status = TailStatus::inconclusive;
  return out;
}

/// Like integrate_to_infinity but throws unless the tail converged.
template <typename G>
double tail_integral(const G& g, double lo, double tol, const char* what = "tail integral") {
  QuadratureResult r = integrate_to_infinity(g, lo, tol);
  if (r.status != TailStatus::converged) {
    std::ostringstream os;
    os << what << " from " << lo << " did not converge ("
       << (r.status == TailStatus::diverges ? "diverges" : "inconclusive") << ")";
    throw NumericsError(os.str());
  }
  return r.value;
}

/// Like integrate_adaptive but throws on non-convergence.
template <typename G>
double definite_integral(const G& g, double lo, double hi, double tol,
                         const char* what = "integral") {
  QuadratureResult r = integrate_adaptive(g, lo, hi, tol);
  if (!r.converged) {
    std::ostringstream os;
    os << what << " on [" << lo << ", " << hi << "] did not converge (estimate "
       << r.error_estimate << ")";
    throw NumericsError(os.str());
  }
  return r.value;
}

}  // namespace blowup
