#include "doctest.h"

#include <cmath>

#include "blowup/criterion.hpp"
#include "blowup/errors.hpp"

using namespace blowup;
using doctest::Approx;

TEST_CASE("Lambda closed forms") {
  Nonlinearity p3 = parse_nonlinearity("pow:3");
  for (double u : {10.0, 1e3, 1e5}) CHECK(lambda_at(p3, u) == Approx(std::sqrt(2.0) / 6).epsilon(1e-8));
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  CHECK(lambda_at(p5, 100.0) == Approx(std::sqrt(3.0) / 1600).epsilon(1e-8));
  Nonlinearity ex = parse_nonlinearity("exp");
  // G = 2 sqrt2 (e^(u/2) - 1) from base 0, so Lambda -> sqrt2 e^(-u/2).
  for (double u : {10.0, 20.0, 40.0}) {
    CHECK(lambda_at(ex, u) / (std::sqrt(2.0) * std::exp(-u / 2)) == Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("Lambda is scale-free for powers") {
  for (double p : {2.5, 3.0, 4.0, 6.0}) {
    Nonlinearity nl = Nonlinearity::power(p);
    for (double u : {2.0, 7.0, 30.0, 400.0, 5e3}) {
      CHECK(lambda_at(nl, 2 * u) / lambda_at(nl, u) ==
            Approx(std::pow(2.0, (3 - p) / 2)).epsilon(1e-3));
    }
  }
}

TEST_CASE("classification of the builtin families") {
  auto r3 = classify(parse_nonlinearity("pow:3"), 100.0, 1e4, 32);
  CHECK(r3.classification == Classification::non_universal);
  CHECK(std::abs(r3.slope) < 0.05);
  CHECK(r3.lambda.back() == Approx(std::sqrt(2.0) / 6).epsilon(0.01));
  CHECK(r3.base_point == 0.0);

  auto r5 = classify(parse_nonlinearity("pow:5"), 100.0, 1e4, 32);
  CHECK(r5.classification == Classification::universal);
  CHECK(r5.slope == Approx(-1.0).epsilon(0.05));

  auto re = classify(parse_nonlinearity("exp"), 1.0, 100.0, 32);
  CHECK(re.classification == Classification::universal);

  for (double p : {3.5, 4.0, 5.0, 6.0}) {
    auto r = classify(Nonlinearity::power(p), 100.0, 1e4, 24);
    CHECK(r.classification == Classification::universal);
    CHECK(std::abs(r.slope - (3 - p) / 2) <= 0.05);
  }
}

TEST_CASE("enlarging the range does not flip the classification") {
  for (const char* spec : {"pow:3", "pow:4", "pow:5"}) {
    Nonlinearity nl = parse_nonlinearity(spec);
    auto a = classify(nl, 10.0, 1e3, 24);
    auto b = classify(nl, 10.0, 1e4, 24);
    CHECK(a.classification == b.classification);
  }
}

TEST_CASE("sample failures are inconclusive with the failing u") {
  // Lambda underflows to 0 far out for exp.
  auto r = classify(parse_nonlinearity("exp"), 10.0, 1e4, 16);
  CHECK(r.classification == Classification::inconclusive);
  REQUIRE(r.failed_at.has_value());
  CHECK(*r.failed_at > 10.0);
  CHECK_FALSE(r.failure.empty());
  CHECK_THROWS_AS(classify(parse_nonlinearity("pow:3"), 10.0, 100.0, 32), DomainError);
}

TEST_CASE("weakened criterion along the zeroth profile") {
  Nonlinearity p5 = parse_nonlinearity("pow:5");
  BlowupProfile b5(make_v0(p5, 2.0));
  auto rows = lambda_along_profile(p5, 3, b5, {1e-2, 1e-3, 1e-4});
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].lambda / rows[i - 1].lambda == Approx(std::sqrt(0.1)).epsilon(1e-6));
  }
  CHECK(rows[1].predicted_gap == Approx(2 * rows[1].lambda));

  Nonlinearity p3 = parse_nonlinearity("pow:3");
  BlowupProfile b3(make_v0(p3, 4.0));
  for (const auto& row : lambda_along_profile(p3, 3, b3, {1e-2, 1e-3})) {
    CHECK(row.lambda == Approx(std::sqrt(2.0) / 6).epsilon(1e-8));
  }
  CHECK(lambda_along_profile(p3, 3, b3, {1e-2}).size() == 1);
}
