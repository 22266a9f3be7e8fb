#include "blowup/energy.hpp"

#include <cmath>

namespace blowup {

double tail_origin(const Nonlinearity& nl, double base) {
  const double lowest = std::min(base, nl.base_point());
  // Exponential F is positive everywhere, so allow queries below the base.
  return nl.kind() == Nonlinearity::Kind::exponential ? lowest - 1.0 : lowest;
}

namespace {

double table_scale(double base) { return std::max(1.0, std::abs(base)); }

}  // namespace

EnergyIntegrals::EnergyIntegrals(const Nonlinearity& nl, std::optional<double> base, double tol)
    : nl_(nl),
      base_(base.value_or(nl.base_point())),
      G_([nl](double t) { return nl.v0(t); }, base_, tol, table_scale(base_)),
      R0_(
          [nl](double t) {
            const double F = nl.F(t);
            return std::isinf(F) ? 0.0 : 1.0 / std::sqrt(2.0 * F);
          },
          tail_origin(nl, base_), tol, table_scale(base_)),
      K_(
          [nl, G = G_](double t) {
            const double F = nl.F(t);
            if (std::isinf(F)) return 0.0;
            return G(t) / std::pow(2.0 * F, 1.5);
          },
          tail_origin(nl, base_), tol, table_scale(base_)) {}

double EnergyIntegrals::lambda(double u) const {
  const double F = nl_.F(u);
  if (std::isinf(F)) return 0.0;
  return std::sqrt(2.0 * F) * K(u);
}

}  // namespace blowup
