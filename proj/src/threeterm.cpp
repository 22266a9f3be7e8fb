#include "blowup/threeterm.hpp"

#include <cmath>

#include "blowup/energy.hpp"
#include "blowup/errors.hpp"
#include "blowup/numerics/quadrature.hpp"
#include "blowup/numerics/roots.hpp"

namespace blowup {

namespace {

constexpr double kTol = 1e-12;
// R2 is a correction term; its nested tables run at a looser tolerance.
constexpr double kR2Tol = 1e-10;

}  // namespace

double op_P(const ScalarFn& v, double b, double u) {
  return definite_integral(v, b, u, kTol, "P");
}

double op_Q(const ScalarFn& v, double b, double u) { return op_P(v, b, u) / v(u); }

double op_R(const ScalarFn& v, double u) {
  return tail_integral([&v](double t) { return 1.0 / v(t); }, u, kTol, "R");
}

double op_T(const ScalarFn& v, double b, int N, double u) {
  const double scale = std::max(1.0, std::abs(b));
  Antiderivative P(v, b, kTol, scale);
  // R is needed down to the base point; anchor its table just below it.
  TailIntegral R([v](double t) { return 1.0 / v(t); }, b - scale, kTol, scale);
  const double pq = definite_integral([&](double t) { return P(t) / v(t); }, b, u, kTol, "PQ");
  const double pvr = definite_integral([&](double t) { return v(t) * R(t); }, b, u, kTol, "PvR");
  return (N - 1) * pq + pvr;
}

struct ThreeTerm::Impl {
  Impl(const Nonlinearity& nl, int N, std::optional<double> base, R2Reading reading)
      : N(N),
        reading(reading),
        E(nl, base),
        G_over_v(
            [nl, E = E](double t) {
              const double F = nl.F(t);
              return F > 0.0 ? E.G(t) / std::sqrt(2.0 * F) : 0.0;
            },
            E.base(), kR2Tol, std::max(1.0, std::abs(E.base()))),
        v_R0(
            [nl, E = E](double t) {
              const double F = nl.F(t);
              return F > 0.0 ? std::sqrt(2.0 * F) * E.R0(t) : 0.0;
            },
            E.base(), kR2Tol, std::max(1.0, std::abs(E.base()))),
        R2_tail(
            [this, nl](double u) {
              const double F = nl.F(u);
              if (std::isinf(F)) return 0.0;
              const double twoF = 2.0 * F;
              const double G = E.G(u);
              return (this->N - 1) * (-J(u) + 1.25 * (this->N - 1) * G * G / twoF) /
                     std::pow(twoF, 1.5);
            },
            tail_origin(nl, E.base()), kR2Tol, std::max(1.0, std::abs(E.base()))) {}

  // int_b^u H with H = (N-1) G/v0 + v0 R0 read per `reading`.
  double J(double u) const {
    const double first = (N - 1) * G_over_v(u);
    if (reading == R2Reading::running) return first + v_R0(u);
    return first + E.G(u) * E.R0(u);
  }

  int N;
  R2Reading reading;
  EnergyIntegrals E;
  Antiderivative G_over_v;
  Antiderivative v_R0;
  TailIntegral R2_tail;
};

ThreeTerm::ThreeTerm(const Nonlinearity& nl, int N, std::optional<double> base,
                     R2Reading reading) {
  if (N < 1) throw DomainError("dimension N must be at least 1");
  impl_ = std::make_shared<const Impl>(nl, N, base, reading);
}

double ThreeTerm::base() const { return impl_->E.base(); }
double ThreeTerm::R0(double U) const { return impl_->E.R0(U); }
double ThreeTerm::R1(double U) const { return (impl_->N - 1) * impl_->E.K(U); }
double ThreeTerm::R2(double U) const {
  if (impl_->N == 1) return 0.0;
  return impl_->R2_tail(U);
}

RemainderTriple ThreeTerm::at(double U) const {
  if (U < base()) throw DomainError("remainders need U >= b");
  RemainderTriple t;
  t.U = U;
  t.base = base();
  try {
    t.R0 = R0(U);
  } catch (const NumericsError& e) {
    throw NumericsError(std::string("R0: ") + e.what());
  }
  try {
    t.R1 = R1(U);
  } catch (const NumericsError& e) {
    throw NumericsError(std::string("R1: ") + e.what());
  }
  try {
    t.R2 = R2(U);
  } catch (const NumericsError& e) {
    throw NumericsError(std::string("R2: ") + e.what());
  }
  return t;
}

RemainderTriple remainder_terms(const Nonlinearity& nl, int N, double U,
                                std::optional<double> base, R2Reading reading) {
  return ThreeTerm(nl, N, base, reading).at(U);
}

double invert_three_term(const Nonlinearity& nl, int N, double d, std::optional<double> base,
                         int terms, R2Reading reading) {
  require_keller_osserman(nl, std::max(nl.threshold(), 0.0) + 1.0);
  return invert_three_term(ThreeTerm(nl, N, base, reading), nl, d, terms);
}

double invert_three_term(const ThreeTerm& tt, const Nonlinearity& nl, double d, int terms) {
  if (!(d > 0.0)) throw DomainError("d must be positive");
  if (terms < 1 || terms > 3) throw DomainError("terms must be 1, 2 or 3");
  auto sum = [&](double x) {
    const double u = std::exp(x);
    double s = tt.R0(u);
    if (terms >= 2) s += tt.R1(u);
    if (terms >= 3) s += tt.R2(u);
    return s - d;
  };
  // The zeroth profile anchors the bracket: R0(u0) = d.
  const double floor = std::max(tt.base(), nl.threshold());
  double hi = std::log(std::max(floor, 0.0) + 2.0);
  while (tt.R0(std::exp(hi)) > d) {
    hi += std::log(2.0);
    if (hi > 700.0) throw NumericsError("zeroth profile not bracketed");
  }
  double lo = hi - std::log(2.0);
  const double step = std::log(2.0);
  for (int i = 0; sum(hi) > 0.0; ++i) {
    if (i > 60) throw BracketError("three-term sum not bracketed; d too large");
    hi += step;
  }
  for (int i = 0; sum(lo) < 0.0; ++i) {
    if (i > 60 || std::exp(lo - step) <= floor) {
      throw BracketError("three-term sum not bracketed; d too large for the asymptotic regime");
    }
    lo -= step;
  }
  return std::exp(find_root_monotone(sum, lo, hi, 1e-14));
}

}  // namespace blowup
