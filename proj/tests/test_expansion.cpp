#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "blowup/errors.hpp"
#include "blowup/expansion.hpp"

using namespace blowup;
using doctest::Approx;

namespace {

// Composite Simpson rule, independent of the library's quadrature.
template <typename G>
double simpson(const G& g, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("v0 closed forms") {
  auto p3 = make_v0(parse_nonlinearity("pow:3"), 4.0);
  CHECK(p3.velocity(10.0) == Approx(70.7107).epsilon(1e-6));
  CHECK((p3.w == 1.0).all());
  auto p5 = make_v0(parse_nonlinearity("pow:5"), 2.0);
  CHECK(p5.velocity(10.0) == Approx(577.350).epsilon(1e-6));
  CHECK(parse_nonlinearity("exp").v0(0.0) == Approx(1.41421).epsilon(1e-5));
}

TEST_CASE("make_v0 preconditions") {
  Nonlinearity p3 = parse_nonlinearity("pow:3");
  ExpansionOptions small;
  small.grid = 32;
  CHECK_THROWS_AS(make_v0(p3, 4.0, small), DomainError);
  ExpansionOptions short_range;
  short_range.umax = 40.0;
  CHECK_THROWS_AS(make_v0(p3, 4.0, short_range), DomainError);
  CHECK_THROWS_AS(make_v0(parse_nonlinearity("expr:u;a=1"), 4.0), KellerOssermanError);
  CHECK_THROWS_AS(make_v0(p3, 2.0), U0TooSmallError);  // sqrt2/2 > 1/2
}

TEST_CASE("choose_U0 scan") {
  CHECK(choose_U0(parse_nonlinearity("pow:3"), 3) >= 4.0);
  const double u5 = choose_U0(parse_nonlinearity("pow:5"), 3);
  CHECK(u5 >= 2.0);
  CHECK(u5 <= 8.0);
  CHECK(choose_U0(parse_nonlinearity("exp"), 3) >= 4.0);
}

TEST_CASE("zeroth profile closed forms") {
  Nonlinearity p3 = parse_nonlinearity("pow:3");
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  Nonlinearity ex = parse_nonlinearity("exp");
  BlowupProfile b3(make_v0(p3, 4.0));
  BlowupProfile b5(make_v0(p5, 2.0));
  BlowupProfile be(make_v0(ex, 4.0));
  for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
    CHECK(b3(d) == Approx(std::sqrt(2.0) / d).epsilon(1e-8));
    CHECK(b5(d) == Approx(std::sqrt(std::sqrt(3.0) / (2 * d))).epsilon(1e-8));
    CHECK(be(d) == Approx(2 * std::log(std::sqrt(2.0) / d)).epsilon(1e-8));
  }
  CHECK(b3(0.01) == Approx(141.421).epsilon(1e-5));
  CHECK(b5(0.01) == Approx(9.30605).epsilon(1e-5));
  CHECK(be(0.01) == Approx(9.90349).epsilon(1e-5));
  CHECK(b3.cached().size() == 4);  // d = 0.01 was served from the cache
  CHECK_THROWS_AS(b3(1.0), DomainError);
  CHECK_THROWS_AS(b3(0.0), DomainError);
}

TEST_CASE("first iterate for pow:3, N=3 at u = 1000") {
  Nonlinearity p3 = parse_nonlinearity("pow:3");
  const double U0 = choose_U0(p3, 3);
  VelocityProfile v1 = iterate(p3, 3, make_v0(p3, U0));
  const double got = v1.ratio(1000.0);
  // Leading term 1 - (N-1) G/(2F) with G = u^3/(3 sqrt2), F = u^4/4.
  CHECK(std::abs(got - (1.0 - 4.0 / (3.0 * std::sqrt(2.0) * 1000.0))) < 5e-5);
  // Direct quadrature: r(t) = 1 - sqrt2/t for the zeroth iterate.
  auto g = [](double t) { return t * t / std::sqrt(2.0) / (1.0 - std::sqrt(2.0) / t); };
  const double I = simpson(g, U0, 1000.0, 200000);
  const double want = std::sqrt(1.0 - 2.0 * I / p3.F(1000.0));
  CHECK(got == Approx(want).epsilon(1e-8));
}

TEST_CASE("N = 1 leaves every iterate equal to v0") {
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  auto res = iterate_to_convergence(p5, 1, 2.0, 1e-12, 5);
  CHECK(res.converged);
  REQUIRE(res.profiles.size() == 2);
  CHECK(res.deltas.at(0) == 0.0);
  CHECK((res.profiles[1].w == 1.0).all());
}

TEST_CASE("tol = 0 runs exactly kmax iterations") {
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  auto res = iterate_to_convergence(p5, 3, 2.0, 0.0, 2);
  REQUIRE(res.profiles.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(res.profiles[k].k == k);
  CHECK_FALSE(res.converged);
}

TEST_CASE("contraction for pow:5, N=3") {
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  const double U0 = choose_U0(p5, 3);
  auto res = iterate_to_convergence(p5, 3, U0, 0.0, 6);
  REQUIRE(res.deltas.size() == 6);
  for (std::size_t k = 1; k < 6; ++k) CHECK(res.deltas[k] <= 0.9 * res.deltas[k - 1]);
  for (const auto& vp : res.profiles) CHECK((vp.w - 1.0).abs().maxCoeff() < kBallRadius);
  CHECK(res.geometric);

  // Doubling U0 and the grid shrinks every delta.
  ExpansionOptions fine;
  fine.grid = 4096;
  auto wide = iterate_to_convergence(p5, 3, 2 * U0, 0.0, 3, fine);
  for (std::size_t k = 0; k < 3; ++k) CHECK(wide.deltas[k] < res.deltas[k]);
}

TEST_CASE("inversion round trip and monotonicity") {
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  auto res = iterate_to_convergence(p5, 3, 2.0, 0.0, 2);
  BlowupProfile b2(res.profiles[2]);
  double prev = 0.0;
  for (double d : {2e-1, 1e-1, 3e-2, 1e-2, 1e-3, 1e-4, 1e-6, 1e-9}) {
    const double u = b2(d);
    CHECK(u > prev);
    prev = u;
    CHECK(res.profiles[2].tail_integral(u) == Approx(d).epsilon(1e-8));
  }
}

TEST_CASE("asymptotic ordering of iterates at the top decade") {
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  auto res = iterate_to_convergence(p5, 3, 2.0, 0.0, 2);
  const auto& w1 = res.profiles[1].w;
  const auto& w2 = res.profiles[2].w;
  const Eigen::Index M = w1.size();
  for (Eigen::Index i = M - M / 6; i < M; ++i) {
    CHECK(std::abs(w1(i) - 1.0) >= std::abs(w2(i) - w1(i)));
  }
  CHECK(std::abs(w2(M - 1) - w1(M - 1)) < 1e-10);
}

TEST_CASE("grid refinement stability of u_1 at d = 1e-3") {
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  auto coarse = iterate_to_convergence(p5, 3, 2.0, 0.0, 1);
  ExpansionOptions fine;
  fine.grid = 4096;
  fine.umax = 4e6;
  auto refined = iterate_to_convergence(p5, 3, 2.0, 0.0, 1, fine);
  const double a = profile_from_velocity(coarse.profiles[1], 1e-3);
  const double b = profile_from_velocity(refined.profiles[1], 1e-3);
  CHECK(std::abs(a - b) / a < 1e-5);
}

TEST_CASE("compare_profiles") {
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  auto res = iterate_to_convergence(p5, 3, 2.0, 0.0, 2);
  BlowupProfile b0(res.profiles[0]), b1(res.profiles[1]), b2(res.profiles[2]);
  const std::vector<double> ds{1e-1, 1e-2, 1e-3, 1e-4};
  for (const auto& row : compare_profiles(b1, b1, ds)) {
    CHECK(row.gap == 0.0);
    CHECK(row.normalized_gap == 0.0);
  }
  for (const BlowupProfile* pair : {&b0, &b1}) {
    const BlowupProfile& next = pair == &b0 ? b1 : b2;
    auto rows = compare_profiles(*pair, next, ds);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].normalized_gap / rows[i].tail < rows[i - 1].normalized_gap / rows[i - 1].tail);
    }
  }
  auto one = iterate_to_convergence(p5, 1, 2.0, 0.0, 1);
  BlowupProfile c0(one.profiles[0]), c1(one.profiles[1]);
  for (const auto& row : compare_profiles(c0, c1, ds)) CHECK(row.gap == 0.0);
}

TEST_CASE("one-dimensional profiles") {
  Nonlinearity p3 = parse_nonlinearity("pow:3");
  CHECK(one_dim_profile(p3, 0.0, 0.01) == Approx(std::sqrt(2.0) / 0.01).epsilon(1e-10));
  BlowupProfile b0(make_v0(p3, 4.0));
  for (double d : {1e-1, 1e-3}) CHECK(one_dim_profile(p3, 0.0, d) == Approx(b0(d)).epsilon(1e-10));

  const double phi0 = one_dim_profile(p3, 0.0, 0.01);
  const double phi1 = one_dim_profile(p3, 1.0, 0.01);
  CHECK(phi0 - phi1 > 0.0);
  CHECK(phi0 - phi1 < 1e-3);
  double prev = 1.0;
  for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double gap = one_dim_gap(p3, 1.0, d);
    CHECK(gap > 0.0);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-3);
  // Where the gap is resolvable, the stable evaluation matches subtraction.
  const double direct = one_dim_profile(p3, 0.0, 0.5) - one_dim_profile(p3, 1.0, 0.5);
  CHECK(one_dim_gap(p3, 1.0, 0.5) == Approx(direct).epsilon(1e-6));
}
