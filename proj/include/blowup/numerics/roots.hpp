#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "blowup/errors.hpp"

namespace blowup {

/// Root of a monotone h on [lo, hi] by Brent's bracketing method
/// (bisection safeguarding secant and inverse quadratic steps). Stops when
/// h hits zero exactly or the bracket is narrower than `tol` (absolute),
/// floored at a few ulps of the root.
template <typename H>
double find_root_monotone(const H& h, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double fa = h(a), fb = h(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream os;
    os << "no sign change on [" << lo << ", " << hi << "]: h(lo)=" << fa
       << ", h(hi)=" << fb;
    throw BracketError(os.str());
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < 400; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (m > 0.0 ? tol1 : -tol1);
    fb = h(b);
  }
  throw NumericsError("root finder exceeded iteration limit");
}

}  // namespace blowup
