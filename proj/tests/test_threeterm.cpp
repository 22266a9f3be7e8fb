#include "doctest.h"

#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/expansion.hpp"
#include "blowup/threeterm.hpp"

using namespace blowup;
using doctest::Approx;

TEST_CASE("operators on v0 for pow:3") {
  ScalarFn v = [](double t) { return t * t / std::sqrt(2.0); };
  CHECK(op_P(v, 0.0, 10.0) == Approx(1000.0 / (3 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(op_P(v, 0.0, 10.0) == Approx(235.702).epsilon(1e-5));
  CHECK(op_R(v, 10.0) == Approx(0.141421).epsilon(1e-5));
  CHECK(op_Q(v, 0.0, 10.0) == Approx(10.0 / 3).epsilon(1e-12));
  // P(Qv) = u^2/6, P(v Rv) = u^2/2.
  CHECK(op_T(v, 0.0, 3, 10.0) == Approx(2 * 100.0 / 6 + 100.0 / 2).epsilon(1e-9));
}

TEST_CASE("remainder closed forms for pow:5, N = 3, U = 10") {
  auto t = remainder_terms(parse_nonlinearity("pow:5"), 3, 10.0);
  CHECK(std::abs(t.R0 - std::sqrt(3.0) / 200) < 1e-8);
  CHECK(std::abs(t.R1 - 3.75e-5) < 1e-9);
  CHECK(std::abs(t.R2) / t.R1 < 0.1);
  // Hand evaluation: J = ((N-1)/8 + 1/4) u^2, G^2/(2F) = u^2/16.
  const double want = 2 * (-0.5 + 1.25 * 2 / 16) * std::pow(3.0, 1.5) / (6 * std::pow(10.0, 6));
  CHECK(t.R2 == Approx(want).epsilon(1e-8));
  CHECK(t.R0 > std::abs(t.R1));
  CHECK(std::abs(t.R1) > std::abs(t.R2));
}

TEST_CASE("the outer reading of R2 differs") {
  // Outer reading: J = (N-1) u^2/8 + G(u) R0(u) = (N-1) u^2/8 + u^2/8.
  auto t = remainder_terms(parse_nonlinearity("pow:5"), 3, 10.0, std::nullopt, R2Reading::outer);
  const double want = 2 * (-0.375 + 1.25 * 2 / 16) * std::pow(3.0, 1.5) / (6 * std::pow(10.0, 6));
  CHECK(t.R2 == Approx(want).epsilon(1e-8));
}

TEST_CASE("N = 1 removes R1 and R2") {
  auto t = remainder_terms(parse_nonlinearity("pow:5"), 1, 10.0);
  CHECK(t.R1 == 0.0);
  CHECK(t.R2 == 0.0);
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  CHECK(invert_three_term(p5, 1, 1e-3) == Approx(std::sqrt(std::sqrt(3.0) / 2e-3)).epsilon(1e-10));
}

TEST_CASE("base point sensitivity of R1") {
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  for (double U : {10.0, 30.0}) {
    const double r1 = ThreeTerm(p5, 3, 0.0).R1(U);
    const double shifted = ThreeTerm(p5, 3, 2.0).R1(U);
    CHECK(std::abs(shifted - r1) / r1 < 0.01);
  }
}

TEST_CASE("inversion against the fixed-point profiles") {
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  auto res = iterate_to_convergence(p5, 3, 2.0, 0.0, 2);
  BlowupProfile b0(res.profiles[0]);
  BlowupProfile b2(res.profiles[2]);
  ThreeTerm tt(p5, 3);
  for (double d : {1e-2, 1e-3}) {
    CHECK(invert_three_term(tt, p5, d, 1) == Approx(b0(d)).epsilon(1e-8));
  }
  const double u2 = invert_three_term(tt, p5, 1e-3);
  CHECK(std::abs(u2 - b2(1e-3)) / b2(1e-3) < 1e-3);
  double prev = 1.0;
  for (double d : {1e-2, 1e-3, 1e-4}) {
    const double err = std::abs(invert_three_term(tt, p5, d) - b2(d)) / b0(d);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("pow:3 three-term roots lie above the zeroth profile") {
  Nonlinearity p3 = parse_nonlinearity("pow:3");
  ThreeTerm tt(p3, 3);
  for (double d : {1e-2, 1e-3}) {
    CHECK(invert_three_term(tt, p3, d) > std::sqrt(2.0) / d);
  }
}
