#pragma once

// Running integrals of v0 = sqrt(2F) shared by the criterion, the
// three-term remainders and the shooting diagnostics.

#include <optional>

#include "blowup/nonlinearity.hpp"
#include "blowup/numerics/cumulative.hpp"

namespace blowup {

/// Memoized G(u) = int_b^u v0, R0(u) = int_u^inf dt/v0 and
/// K(u) = int_u^inf G/(2F)^(3/2) for a fixed base point b.
///
/// Integrands where F overflows to +inf are taken as 0 (their true size is
/// far below double resolution), which keeps exponential tails finite.
class EnergyIntegrals {
 public:
  /// `base` defaults to nl.base_point().
  explicit EnergyIntegrals(const Nonlinearity& nl, std::optional<double> base = std::nullopt,
                           double tol = 1e-12);

  const Nonlinearity& nonlinearity() const { return nl_; }
  double base() const { return base_; }

  double v0(double u) const { return nl_.v0(u); }
  double G(double u) const { return G_(u); }
  double R0(double u) const { return R0_(u); }
  double K(double u) const { return K_(u); }
  /// Lambda(u) = v0(u) K(u), the quantity whose limit decides universality.
  double lambda(double u) const;

 private:
  Nonlinearity nl_;
  double base_;
  Antiderivative G_;
  TailIntegral R0_;
  TailIntegral K_;
};

/// Lower edge of the tail tables: queries must lie strictly above it.
double tail_origin(const Nonlinearity& nl, double base);

}  // namespace blowup
