#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "blowup/numerics/cumulative.hpp"
#include "blowup/numerics/ode.hpp"
#include "blowup/numerics/quadrature.hpp"
#include "blowup/numerics/roots.hpp"

using namespace blowup;
using doctest::Approx;

TEST_CASE("Gauss-Kronrod weights integrate constants and high-degree monomials") {
  // Kronrod-21 is exact through degree 31.
  for (int k = 0; k <= 31; ++k) {
    auto g = [k](double t) { return std::pow(t, k); };
    detail::Panel p = detail::gauss_kronrod21(g, 0.0, 1.0);
    CHECK(p.value == Approx(1.0 / (k + 1)).epsilon(1e-14));
  }
}

TEST_CASE("integrate_adaptive closed forms") {
  auto sq = [](double t) { return t * t; };
  auto r1 = integrate_adaptive(sq, 0.0, 1.0, 1e-10);
  CHECK(r1.converged);
  CHECK(r1.value == Approx(1.0 / 3).epsilon(1e-12));

  auto inv2 = [](double t) { return 2.0 / (t * t); };
  auto r2 = integrate_adaptive(inv2, 1.0, 10.0, 1e-10);
  CHECK(r2.converged);
  CHECK(r2.value == Approx(1.8).epsilon(1e-12));

  auto r3 = integrate_adaptive([](double t) { return std::sin(t); }, 0.0, std::numbers::pi, 1e-10);
  CHECK(r3.converged);
  CHECK(r3.value == Approx(2.0).epsilon(1e-12));
  CHECK(r3.error_estimate <= 1e-10 * std::max(1.0, std::abs(r3.value)));
}

TEST_CASE("integrate_adaptive reports non-convergence at the panel limit") {
  QuadratureOptions opts;
  opts.max_panels = 8;
  auto r = integrate_adaptive([](double t) { return std::sin(1.0 / t); }, 1e-6, 1.0, 1e-12, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.panels == 8);
}

TEST_CASE("integrate_adaptive error estimates are conservative") {
  std::mt19937_64 rng(20261018);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> lo_d(-2.0, 1.0);
  std::uniform_real_distribution<double> len_d(0.1, 5.0);
  int honest = 0;
  const int trials = 50;
  for (int trial = 0; trial < trials; ++trial) {
    const double lo = lo_d(rng);
    const double hi = lo + len_d(rng);
    double exact;
    QuadratureResult got;
    if (trial % 2 == 0) {
      double c[9];
      for (double& ci : c) ci = coef(rng);
      auto poly = [&](double t) {
        double s = 0.0;
        for (int k = 8; k >= 0; --k) s = s * t + c[k];
        return s;
      };
      exact = 0.0;
      for (int k = 0; k <= 8; ++k) {
        exact += c[k] * (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1);
      }
      got = integrate_adaptive(poly, lo, hi, 1e-10);
    } else {
      const double a = coef(rng), b = coef(rng);
      exact = a / b * (std::exp(b * hi) - std::exp(b * lo));
      got = integrate_adaptive([&](double t) { return a * std::exp(b * t); }, lo, hi, 1e-10);
    }
    if (std::abs(got.value - exact) <= got.error_estimate) ++honest;
  }
  CHECK(honest >= 48);  // >= 95% of 50
}

TEST_CASE("integrate_to_infinity closed forms and divergence") {
  auto r1 = integrate_to_infinity([](double t) { return 2.0 / (t * t); }, 1.0, 1e-10);
  CHECK(r1.status == TailStatus::converged);
  CHECK(r1.value == Approx(2.0).epsilon(1e-10));

  auto r2 = integrate_to_infinity([](double t) { return std::exp(-t); }, 0.0, 1e-10);
  CHECK(r2.status == TailStatus::converged);
  CHECK(r2.value == Approx(1.0).epsilon(1e-10));

  auto r3 = integrate_to_infinity([](double t) { return 1.0 / t; }, 1.0, 1e-10);
  CHECK(r3.status == TailStatus::diverges);
  CHECK_FALSE(r3.converged);

  // Slow but convergent tail t^-1.25 (ratio 0.84 per doubling).
  auto r4 = integrate_to_infinity([](double t) { return std::pow(t, -1.25); }, 1.0, 1e-10);
  CHECK(r4.status == TailStatus::converged);
  CHECK(r4.value == Approx(4.0).epsilon(1e-9));
}

TEST_CASE("integrate_to_infinity flags oscillating tails as inconclusive") {
  auto r = integrate_to_infinity([](double t) { return std::sin(t); }, 1.0, 1e-10);
  CHECK(r.status == TailStatus::inconclusive);
  CHECK_FALSE(r.converged);
}

TEST_CASE("integrate_to_infinity is additive over a split point") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> beta_d(1.5, 4.0);
  std::uniform_real_distribution<double> split_d(1.5, 50.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double beta = beta_d(rng);
    const double split = split_d(rng);
    auto g = [beta](double t) { return std::pow(t, -beta) * (1.0 + std::exp(-t)); };
    auto whole = integrate_to_infinity(g, 1.0, 1e-12);
    auto tail = integrate_to_infinity(g, split, 1e-12);
    auto head = integrate_adaptive(g, 1.0, split, 1e-12);
    REQUIRE(whole.converged);
    REQUIRE(tail.converged);
    const double budget = whole.error_estimate + tail.error_estimate + head.error_estimate;
    CHECK(std::abs(tail.value + head.value - whole.value) <= std::max(budget, 1e-14));
  }
}

TEST_CASE("find_root_monotone") {
  CHECK(find_root_monotone([](double x) { return x - 3.0; }, 0.0, 10.0, 1e-12) ==
        Approx(3.0).epsilon(1e-12));
  CHECK(find_root_monotone([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-12) ==
        Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(find_root_monotone([](double x) { return std::exp(x) - 1.0; }, -1.0, 1.0,
                                    1e-14)) < 1e-13);
  CHECK_THROWS_AS(find_root_monotone([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12),
                  BracketError);
}

TEST_CASE("integrate_ivp: exponential growth to an endpoint") {
  Rhs rhs = [](double, const State& y) { return State(y); };
  State y0(1);
  y0 << 1.0;
  IvpOptions o;
  o.rtol = 1e-11;
  o.atol = 1e-13;
  Trajectory t = integrate_ivp(rhs, y0, 0.0, 1.0, nullptr, o);
  CHECK(t.termination == Termination::endpoint);
  CHECK(t.r.back() == 1.0);
  CHECK(std::abs(t.back()(0) - std::numbers::e) < 1e-8);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.r[i] > t.r[i - 1]);
}

TEST_CASE("integrate_ivp: cap event on y' = y^2") {
  Rhs rhs = [](double, const State& y) { return State(y.array().square()); };
  State y0(1);
  y0 << 1.0;
  IvpOptions o;
  o.rtol = 1e-10;
  o.atol = 1e-12;
  Trajectory t = integrate_ivp(rhs, y0, 0.0, 10.0,
                               [](double, const State& y) { return y(0) > 1e6; }, o);
  CHECK(t.termination == Termination::cap_reached);
  CHECK(std::abs(t.r.back() - (1.0 - 1e-6)) < 1e-6);
}

TEST_CASE("integrate_ivp: constant solution") {
  Rhs rhs = [](double, const State& y) { return State(State::Zero(y.size())); };
  State y0(1);
  y0 << 5.0;
  Trajectory t = integrate_ivp(rhs, y0, 0.0, 2.0, nullptr);
  CHECK(t.termination == Termination::endpoint);
  for (const State& y : t.y) CHECK(y(0) == 5.0);
}

TEST_CASE("integrate_ivp: fifth-order convergence under step halving") {
  Rhs rhs = [](double, const State& y) { return State(y); };
  State y0(1);
  y0 << 1.0;
  auto endpoint_error = [&](double h) {
    IvpOptions o;
    o.fixed_step = true;
    o.initial_step = h;
    Trajectory t = integrate_ivp(rhs, y0, 0.0, 1.0, nullptr, o);
    return std::abs(t.back()(0) - std::numbers::e);
  };
  const double e1 = endpoint_error(0.1);
  const double e2 = endpoint_error(0.05);
  CHECK(e1 / e2 >= 4.0);
  CHECK(e1 / e2 > 16.0);  // embedded order >= 4 gives at least 2^4
}

TEST_CASE("integrate_ivp: tighter tolerance never worsens the endpoint error") {
  Rhs rhs = [](double, const State& y) { return State(y); };
  State y0(1);
  y0 << 1.0;
  double prev = 1.0;
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    IvpOptions o;
    o.rtol = tol;
    o.atol = tol * 1e-2;
    Trajectory t = integrate_ivp(rhs, y0, 0.0, 1.0, nullptr, o);
    const double err = std::abs(t.back()(0) - std::numbers::e);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("integrate_ivp: step underflow is reported with a partial trajectory") {
  Rhs rhs = [](double r, const State& y) {
    State d(1);
    d << 1.0 / std::pow(1.0 - r, 3);
    (void)y;
    return d;
  };
  State y0(1);
  y0 << 0.0;
  IvpOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-14;
  o.min_step_rel = 1e-9;
  Trajectory t = integrate_ivp(rhs, y0, 0.0, 2.0, nullptr, o);
  CHECK(t.termination == Termination::step_underflow);
  CHECK(t.size() > 1);
  CHECK(t.r.back() < 1.0);
}

TEST_CASE("Antiderivative and TailIntegral match closed forms") {
  Antiderivative cube([](double t) { return t * t * t; }, 0.0, 1e-13);
  for (double t : {0.3, 1.0, 7.5, 123.0, 4.5e4}) {
    CHECK(cube(t) == Approx(std::pow(t, 4) / 4).epsilon(1e-12));
  }
  TailIntegral inv3([](double t) { return std::pow(t, -3.0); }, 0.0, 1e-13);
  for (double t : {0.01, 1.0, 3.3, 1e3, 1e7, 1e14}) {
    CHECK(inv3(t) == Approx(0.5 / (t * t)).epsilon(1e-11));
  }
  CHECK_THROWS_AS(inv3(0.0), DomainError);
}
