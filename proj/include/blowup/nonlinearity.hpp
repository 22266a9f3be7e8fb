#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "blowup/expression.hpp"
#include "blowup/numerics/quadrature.hpp"

namespace blowup {

/// The nonlinearity f of Delta u = f(u) together with its antiderivative F.
///
/// Builtin families carry closed forms: power p gives f = c u^p and
/// F = c t^(p+1)/(p+1) (base point 0), exponential gives f = e^u and
/// F = e^t. A direct-F nonlinearity is specified by F alone, with f = F'
/// by central differences. An expression nonlinearity is specified by f,
/// with F(t) the integral of f from the threshold a to t, evaluated by
/// quadrature with memoized checkpoints.
///
/// Values are immutable and cheap to copy; concurrent evaluation is safe.
class Nonlinearity {
 public:
  enum class Kind { power, exponential, direct_F, expression };

  static Nonlinearity power(double p, double coefficient = 1.0);
  static Nonlinearity exponential();
  /// `a` defaults to the threshold scan described for parse_nonlinearity.
  static Nonlinearity from_F(const Expression& F, std::optional<double> a = std::nullopt,
                             std::string spec = {});
  static Nonlinearity from_f(const Expression& f, std::optional<double> a = std::nullopt,
                             std::string spec = {});

  Kind kind() const;
  /// Positivity threshold a: f(a) > 0 and f >= 0 beyond it.
  double threshold() const;
  /// Lower limit used for running integrals of sqrt(2F): 0 for builtins,
  /// a otherwise.
  double base_point() const;
  /// Exponent p for the power family.
  double exponent() const;
  double coefficient() const;
  /// Text the value was parsed from (or a canonical spec for builtins).
  const std::string& spec() const;

  double f(double u) const;
  double F(double t) const;
  /// sqrt(2F(u)), the zeroth velocity profile.
  double v0(double u) const;

 private:
  struct Impl;
  explicit Nonlinearity(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Parses `pow:<p>` | `exp` | `F:<expression in t>[;a=<real>]` |
/// `expr:<expression in u>[;a=<real>]`. Without `;a=`, a is the first
/// integer t in 0..10^4 with f(t) > 0 and f >= 0 on the sampled grid
/// {(a+1) 2^j : j = 0..20} beyond it.
///
/// Throws ParseError (grammar), DomainError (p <= 1, invalid a) or
/// ThresholdError (no admissible a).
Nonlinearity parse_nonlinearity(std::string_view spec);

/// F(t); t must not lie below the threshold for expression kinds.
double eval_F(const Nonlinearity& nl, double t);

struct KellerOssermanResult {
  TailStatus status = TailStatus::inconclusive;
  double value = 0.0;
  double error_estimate = 0.0;
  double cutoff = 0.0;
};

/// Keller-Osserman test: integral of 1/sqrt(F(t)) over [lo, +inf), with no
/// factor 2 under the root. Throws DomainError if F <= 0 is met on the range.
KellerOssermanResult check_keller_osserman(const Nonlinearity& nl, double lo,
                                           double tol = 1e-10);

/// Throws KellerOssermanError unless the test converges from `lo`.
void require_keller_osserman(const Nonlinearity& nl, double lo);

}  // namespace blowup
