#include "blowup/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {

namespace {

using Coeffs = std::vector<double>;

constexpr double kExponentTol = 1e-9;

bool near(double a, double b) { return std::abs(a - b) <= kExponentTol * std::max(1.0, std::abs(b)); }

Coeffs mul(const Coeffs& a, const Coeffs& b, std::size_t len) {
  Coeffs c(len, 0.0);
  for (std::size_t i = 0; i < len && i < a.size(); ++i) {
    for (std::size_t j = 0; i + j < len && j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

Coeffs recip(const Coeffs& a) {
  if (a.empty() || a[0] == 0.0) throw DomainError("series reciprocal needs a nonzero leading coefficient");
  Coeffs b(a.size(), 0.0);
  b[0] = 1.0 / a[0];
  for (std::size_t k = 1; k < a.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += a[j] * b[k - j];
    b[k] = -s / a[0];
  }
  return b;
}

// J.C.P. Miller's recurrence for a^alpha.
Coeffs power(const Coeffs& a, double alpha) {
  if (a.empty() || a[0] == 0.0) throw DomainError("series power needs a nonzero leading coefficient");
  if (a[0] < 0.0 && alpha != std::floor(alpha)) {
    throw DomainError("fractional series power of a negative leading coefficient");
  }
  Coeffs b(a.size(), 0.0);
  b[0] = std::pow(a[0], alpha);
  for (std::size_t k = 1; k < a.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      s += ((alpha + 1.0) * static_cast<double>(j) - static_cast<double>(k)) * a[j] * b[k - j];
    }
    b[k] = s / (static_cast<double>(k) * a[0]);
  }
  return b;
}

}  // namespace

TruncatedSeries::TruncatedSeries(double lead, double step, std::vector<double> coeffs)
    : lead_(lead), step_(step), c_(std::move(coeffs)) {
  if (!(step > 0.0)) throw DomainError("series step must be positive");
  if (c_.empty()) throw DomainError("series needs at least one coefficient");
}

TruncatedSeries TruncatedSeries::monomial(double c, double lead, double step, int order) {
  std::vector<double> v(static_cast<std::size_t>(order) + 1, 0.0);
  v[0] = c;
  return TruncatedSeries(lead, step, std::move(v));
}

double TruncatedSeries::operator()(double u) const {
  const double x = std::pow(u, -step_);
  double s = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * x + *it;
  return std::pow(u, lead_) * s;
}

TruncatedSeries series_truncate(const TruncatedSeries& a, int order) {
  if (order < 0) throw DomainError("truncation order must be nonnegative");
  if (order >= a.order()) return a;
  TruncatedSeries out(a.lead(), a.step(),
                      std::vector<double>(a.coeffs().begin(), a.coeffs().begin() + order + 1));
  out.set_truncated(true);
  return out;
}

TruncatedSeries series_scale(const TruncatedSeries& a, double s) {
  std::vector<double> c = a.coeffs();
  for (double& x : c) x *= s;
  TruncatedSeries out(a.lead(), a.step(), std::move(c));
  out.set_truncated(a.truncated());
  return out;
}

TruncatedSeries series_shift(const TruncatedSeries& a, double delta) {
  TruncatedSeries out(a.lead() + delta, a.step(), a.coeffs());
  out.set_truncated(a.truncated());
  return out;
}

TruncatedSeries series_add(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (!near(a.step(), b.step())) throw DomainError("series steps differ");
  const double lead = std::max(a.lead(), b.lead());
  auto offset = [&](const TruncatedSeries& s) {
    const double k = (lead - s.lead()) / s.step();
    const double r = std::round(k);
    if (!near(k, r)) throw DomainError("series exponents are not on a common lattice");
    return static_cast<int>(r);
  };
  const int oa = offset(a), ob = offset(b);
  const int order = std::min(a.order() + oa, b.order() + ob);
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  for (int k = 0; k <= a.order() && k + oa <= order; ++k) c[k + oa] += a[k];
  for (int k = 0; k <= b.order() && k + ob <= order; ++k) c[k + ob] += b[k];
  TruncatedSeries out(lead, a.step(), std::move(c));
  out.set_truncated(a.truncated() || b.truncated() ||
                    order < std::max(a.order() + oa, b.order() + ob));
  return out;
}

TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (!near(a.step(), b.step())) throw DomainError("series steps differ");
  const int order = std::min(a.order(), b.order());
  TruncatedSeries out(a.lead() + b.lead(), a.step(),
                      mul(a.coeffs(), b.coeffs(), static_cast<std::size_t>(order) + 1));
  out.set_truncated(true);
  return out;
}

namespace {

// A non-monomial series has infinitely many terms under recip and pow.
bool drops_terms(const TruncatedSeries& a) {
  return a.truncated() ||
         std::any_of(a.coeffs().begin() + 1, a.coeffs().end(), [](double c) { return c != 0.0; });
}

}  // namespace

TruncatedSeries series_recip(const TruncatedSeries& a) {
  TruncatedSeries out(-a.lead(), a.step(), recip(a.coeffs()));
  out.set_truncated(drops_terms(a));
  return out;
}

TruncatedSeries series_pow(const TruncatedSeries& a, double alpha) {
  TruncatedSeries out(alpha * a.lead(), a.step(), power(a.coeffs(), alpha));
  out.set_truncated(drops_terms(a));
  return out;
}

TruncatedSeries series_sqrt(const TruncatedSeries& a) { return series_pow(a, 0.5); }

namespace {

[[noreturn]] void resonance(const char* what, int k, double beta) {
  std::ostringstream os;
  os << what << ": term " << k << " has exponent " << beta << " = -1 (resonance)";
  throw ResonanceError(os.str(), k);
}

}  // namespace

TruncatedSeries series_tail_integrate(const TruncatedSeries& a) {
  std::vector<double> c(a.coeffs().size());
  for (int k = 0; k <= a.order(); ++k) {
    const double beta = a.exponent(k);
    if (near(beta, -1.0)) resonance("tail integration", k, beta);
    if (beta > -1.0 && a[k] != 0.0) {
      std::ostringstream os;
      os << "tail integral of t^" << beta << " diverges (term " << k << ")";
      throw DomainError(os.str());
    }
    c[k] = a[k] / (-beta - 1.0);
  }
  TruncatedSeries out(a.lead() + 1.0, a.step(), std::move(c));
  out.set_truncated(a.truncated());
  return out;
}

TruncatedSeries series_base_integrate(const TruncatedSeries& a) {
  std::vector<double> c(a.coeffs().size());
  for (int k = 0; k <= a.order(); ++k) {
    const double beta = a.exponent(k);
    if (near(beta, -1.0)) resonance("base integration", k, beta);
    c[k] = a[k] / (beta + 1.0);
  }
  TruncatedSeries out(a.lead() + 1.0, a.step(), std::move(c));
  out.set_truncated(a.truncated());
  return out;
}

SeriesExpansion power_coefficients(double p, int N, int n) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("power_coefficients needs p > 1");
  if (n < 0) throw DomainError("order n must be nonnegative");
  if (N < 1) throw DomainError("dimension N must be at least 1");
  const double ratio = 2.0 / (p - 1.0);
  const double q = 0.5 * (p + 1.0);
  if (near(ratio, std::round(ratio))) {
    const int k = static_cast<int>(std::round((q + 1.0) / (q - 1.0)));
    std::ostringstream os;
    os << "2/(p-1) = " << ratio << " is an integer; the expansion needs logarithmic terms";
    throw ResonanceError(os.str(), k);
  }
  const double s = q - 1.0;

  // v_0 = u^q; each pass applies v -> sqrt(2(F - (N-1) int v/r)).
  TruncatedSeries v = TruncatedSeries::monomial(1.0, q, s, n);
  const TruncatedSeries one = TruncatedSeries::monomial(1.0, 0.0, s, n);
  for (int it = 0; it < n; ++it) {
    const TruncatedSeries tail = series_tail_integrate(series_recip(v));
    const TruncatedSeries inv_r = series_recip(series_add(one, series_scale(tail, -1.0)));
    const TruncatedSeries I =
        series_base_integrate(series_truncate(series_mul(v, inv_r), std::max(n - 1, 0)));
    // 1 - 2(N-1) u^(-2q) I, with u^(-2q) I = x (...)
    const TruncatedSeries corr = series_scale(series_shift(I, -2.0 * q), -2.0 * (N - 1));
    v = series_shift(series_sqrt(series_add(one, corr)), q);
  }

  SeriesExpansion se;
  se.p = p;
  se.q = q;
  se.N = N;
  se.n = n;
  se.b = v.coeffs();
  se.b.resize(static_cast<std::size_t>(n) + 1, 0.0);

  // d = int_u^inf dt/v_n = x D(x) with x = u^(-(q-1)).
  const TruncatedSeries tail = series_tail_integrate(series_recip(v));
  Coeffs D = tail.coeffs();
  D.resize(static_cast<std::size_t>(n) + 1, 0.0);
  // Revert: x = d E(d) with E = 1 / D(d E).
  Coeffs E(D.size(), 0.0);
  E[0] = 1.0 / D[0];
  for (int it = 0; it <= n; ++it) {
    Coeffs X(D.size(), 0.0);  // d E(d)
    for (std::size_t k = 1; k < X.size(); ++k) X[k] = E[k - 1];
    Coeffs DX(D.size(), 0.0);
    DX[0] = D[n];
    for (int k = n - 1; k >= 0; --k) {
      DX = mul(DX, X, D.size());
      DX[0] += D[static_cast<std::size_t>(k)];
    }
    E = recip(DX);
  }
  // u = x^(-1/(q-1)) = d^(-1/(q-1)) E^(-1/(q-1)).
  se.a = power(E, -1.0 / s);
  se.upper_index = static_cast<int>(std::floor(ratio));
  se.singular_count = se.upper_index + 1;
  se.beyond_singular = n >= se.singular_count;
  return se;
}

double series_profile(const SeriesExpansion& se, double d) {
  if (!(d > 0.0)) throw DomainError("d must be positive");
  double s = 0.0;
  for (auto it = se.a.rbegin(); it != se.a.rend(); ++it) s = s * d + *it;
  return std::pow(d, -1.0 / (se.q - 1.0)) * s;
}

}  // namespace blowup
