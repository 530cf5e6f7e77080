#include <doctest.h>

#include <cmath>

#include "jitter/errors.hpp"
#include "jitter/quadrature.hpp"
#include "oracles.hpp"

using namespace jitter;

TEST_CASE("low-order rules") {
  const QuadratureRule r1 = gauss_hermite_rule(1);
  CHECK(r1.nodes == std::vector<double>{0.0});
  CHECK(r1.weights == std::vector<double>{1.0});

  const QuadratureRule r2 = gauss_hermite_rule(2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(r2.nodes[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r2.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r2.weights[1] == doctest::Approx(0.5).epsilon(1e-14));

  const QuadratureRule r3 = gauss_hermite_rule(3);
  CHECK(r3.nodes[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r3.nodes[1] == 0.0);
  CHECK(r3.nodes[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r3.weights[0] == doctest::Approx(1.0 / 6).epsilon(1e-14));
  CHECK(r3.weights[1] == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(r3.weights[2] == doctest::Approx(1.0 / 6).epsilon(1e-14));
}

TEST_CASE("order range is enforced") {
  CHECK_THROWS_AS(gauss_hermite_rule(0), InvalidConfig);
  CHECK_THROWS_AS(gauss_hermite_rule(101), InvalidConfig);
  CHECK_NOTHROW(gauss_hermite_rule(100));
}

TEST_CASE("rule structure") {
  for (int I = 1; I <= 100; ++I) {
    const QuadratureRule r = gauss_hermite_rule(I);
    REQUIRE(r.order() == I);
    double total = 0.0;
    for (int i = 0; i < I; ++i) {
      CHECK(r.weights[i] > 0.0);
      total += r.weights[i];
      CHECK(std::abs(r.nodes[i] + r.nodes[I - 1 - i]) <= 1e-12);
      if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("polynomial exactness up to degree 2I-1") {
  for (int I = 2; I <= 20; ++I) {
    const QuadratureRule r = gauss_hermite_rule(I);
    for (int p = 0; p <= 2 * I - 1; ++p) {
      const double q = expect_gaussian([p](double x) { return std::pow(x, p); }, 0.0, 1.0, r);
      const double exact = oracle::normal_moment(p);
      // Relative to E|X|^p: odd moments vanish but their terms do not.
      CHECK(std::abs(q - exact) <= 1e-10 * std::max(1.0, oracle::abs_normal_moment(p)));
    }
    // Degree 2I is the first moment the rule cannot integrate.
    const double q = expect_gaussian([I](double x) { return std::pow(x, 2 * I); }, 0.0, 1.0, r);
    CHECK(std::abs(q - oracle::normal_moment(2 * I)) > 1e-6 * oracle::normal_moment(2 * I));
  }
}

TEST_CASE("Hermite roots") {
  // He_4(x) = x^4 - 6x^2 + 3; He_5(x) = x^5 - 10x^3 + 15x.
  for (double x : gauss_hermite_rule(4).nodes)
    CHECK(std::abs(x * x * x * x - 6 * x * x + 3) < 1e-12);
  for (double x : gauss_hermite_rule(5).nodes)
    CHECK(std::abs(std::pow(x, 5) - 10 * x * x * x + 15 * x) < 1e-11);
}

TEST_CASE("expect_gaussian examples") {
  for (int I : {1, 2, 5, 20}) {
    const QuadratureRule r = gauss_hermite_rule(I);
    CHECK(expect_gaussian([](double x) { return x; }, 3.0, 2.0, r) == doctest::Approx(3.0));
  }
  const QuadratureRule r2 = gauss_hermite_rule(2);
  CHECK(expect_gaussian([](double x) { return x * x; }, 0.0, 1.0, r2) == doctest::Approx(1.0));
  const QuadratureRule r3 = gauss_hermite_rule(3);
  CHECK(expect_gaussian([](double x) { return x * x * x * x; }, 0.0, 1.0, r3) ==
        doctest::Approx(3.0));
  // Shifted and scaled: E[(mu + s X)^2] = mu^2 + s^2.
  CHECK(expect_gaussian([](double x) { return x * x; }, 1.5, 0.5, r3) ==
        doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("sigma zero collapses to f(mu)") {
  const QuadratureRule r = gauss_hermite_rule(20);
  int calls = 0;
  const double v = expect_gaussian(
      [&](double x) {
        ++calls;
        return std::exp(x) + 0.1;
      },
      0.7, 0.0, r);
  CHECK(v == std::exp(0.7) + 0.1);
  CHECK(calls == 1);
}

TEST_CASE("smooth Gaussian expectation converges to closed form") {
  // E[cos(a Z)] = exp(-a^2 / 2).
  const QuadratureRule r = gauss_hermite_rule(20);
  for (double a : {0.5, 1.0, 2.0})
    CHECK(expect_gaussian([a](double x) { return std::cos(a * x); }, 0.0, 1.0, r) ==
          doctest::Approx(std::exp(-0.5 * a * a)).epsilon(1e-12));
}
