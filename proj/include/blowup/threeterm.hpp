#pragma once

// Three-term implicit expansion of the k = 2 profile:
//   d = R0(u) + R1(u) + R2(u) (1 + o(1)),
// built from the operators
//   Pv = int_b^u v,  Qv = Pv / v,  Rv = int_u^inf dt / v,
//   Tv = (N-1) P(Qv) + P(v Rv).

#include <memory>

#include "blowup/nonlinearity.hpp"
#include "blowup/numerics/cumulative.hpp"

namespace blowup {

double op_P(const ScalarFn& v, double b, double u);
double op_Q(const ScalarFn& v, double b, double u);
double op_R(const ScalarFn& v, double u);
double op_T(const ScalarFn& v, double b, int N, double u);

/// Which tail sits inside R2's inner integrand. The display writes
/// int_u^inf ds/sqrt(2F) under an integral in t; `running` reads it as
/// int_t^inf (matching P(v Rv)), `outer` keeps the outer variable u.
enum class R2Reading { running, outer };

struct RemainderTriple {
  double U = 0.0;
  double R0 = 0.0, R1 = 0.0, R2 = 0.0;
  double base = 0.0;
};

/// Memoized R0, R1, R2 for one nonlinearity, dimension and base point.
class ThreeTerm {
 public:
  ThreeTerm(const Nonlinearity& nl, int N, std::optional<double> base = std::nullopt,
            R2Reading reading = R2Reading::running);
  double base() const;
  double R0(double U) const;
  double R1(double U) const;
  double R2(double U) const;
  RemainderTriple at(double U) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

RemainderTriple remainder_terms(const Nonlinearity& nl, int N, double U,
                                std::optional<double> base = std::nullopt,
                                R2Reading reading = R2Reading::running);

/// Root u of R0 + R1 + R2 = d (with `terms` = 1 or 2, only the first terms),
/// bracketed around the zeroth profile. Throws BracketError when d is too
/// large for the sum to be monotone near the root.
double invert_three_term(const Nonlinearity& nl, int N, double d,
                         std::optional<double> base = std::nullopt, int terms = 3,
                         R2Reading reading = R2Reading::running);

/// Same, reusing the memoized tables of `tt` (built for `nl`).
double invert_three_term(const ThreeTerm& tt, const Nonlinearity& nl, double d, int terms = 3);

}  // namespace blowup
