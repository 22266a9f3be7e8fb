#pragma once

// Truncated power-series algebra and the explicit expansion coefficients
// for f(u) = u^p, in the normalization F = u^(2q)/2 with 2q - 1 = p:
//   v ~ u^q sum_k b_k u^(-k(q-1)),   u ~ d^(-1/(q-1)) sum_k a_k d^k.

#include <vector>

namespace blowup {

/// sum_k c_k u^(lead - k step), k = 0..order, i.e. u^lead times a power
/// series in x = u^(-step). Exponents are carried in floating point; the
/// index k is exact.
class TruncatedSeries {
 public:
  TruncatedSeries(double lead, double step, std::vector<double> coeffs);
  /// c u^lead, padded with zeros to `order`.
  static TruncatedSeries monomial(double c, double lead, double step, int order);

  double lead() const { return lead_; }
  double step() const { return step_; }
  int order() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const { return c_; }
  double operator[](int k) const { return c_.at(static_cast<std::size_t>(k)); }
  double exponent(int k) const { return lead_ - k * step_; }
  /// True once an operation has dropped terms beyond the order.
  bool truncated() const { return truncated_; }
  double operator()(double u) const;

  void set_truncated(bool t) { truncated_ = t; }

 private:
  double lead_;
  double step_;
  std::vector<double> c_;
  bool truncated_ = false;
};

TruncatedSeries series_truncate(const TruncatedSeries& a, int order);
TruncatedSeries series_scale(const TruncatedSeries& a, double s);
/// Multiplies by u^delta.
TruncatedSeries series_shift(const TruncatedSeries& a, double delta);
/// Sum of two series on the same exponent lattice (leads differing by a
/// whole number of steps); DomainError otherwise.
TruncatedSeries series_add(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries series_recip(const TruncatedSeries& a);
TruncatedSeries series_pow(const TruncatedSeries& a, double alpha);
TruncatedSeries series_sqrt(const TruncatedSeries& a);
/// t^b -> u^(b+1)/(-b-1), the integral over [u, inf). Every exponent must
/// lie below -1; an exponent equal to -1 is a ResonanceError.
TruncatedSeries series_tail_integrate(const TruncatedSeries& a);
/// t^b -> u^(b+1)/(b+1), an antiderivative with the constant dropped. An
/// exponent equal to -1 is a ResonanceError.
TruncatedSeries series_base_integrate(const TruncatedSeries& a);

struct SeriesExpansion {
  double p = 0.0;
  double q = 0.0;
  int N = 1;
  int n = 0;
  std::vector<double> a;  // a_0..a_n
  std::vector<double> b;  // b_0..b_n
  /// floor(2/(p-1)): the last index whose term d^(k - 2/(p-1)) is singular.
  int upper_index = 0;
  int singular_count = 0;  // upper_index + 1
  /// Orders beyond the singular terms (n >= singular_count) contribute o(1).
  bool beyond_singular = false;
};

/// Runs n steps of the fixed-point recursion on series, then reverts the
/// relation d = int_u^inf dt/v_n. Throws DomainError for p <= 1 or n < 0
/// and ResonanceError when 2/(p-1) is within 1e-9 of an integer or an
/// exponent hits -1 during the recursion.
SeriesExpansion power_coefficients(double p, int N, int n);

/// d^(-1/(q-1)) sum_{k<=n} a_k d^k.
double series_profile(const SeriesExpansion& se, double d);

}  // namespace blowup
