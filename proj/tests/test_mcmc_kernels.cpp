#include <doctest.h>

#include <cmath>

#include "jitter/errors.hpp"
#include "jitter/mcmc_kernels.hpp"
#include "oracles.hpp"
#include "sampler_suites.hpp"

using namespace jitter;

TEST_CASE("rejection: target equal to proposal accepts immediately") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto d = rejection_sample([](double x) { return suites::log_normal_pdf(x, 0, 1); },
                                    [](Rng& r) { return r.normal(); },
                                    [](double x) { return suites::log_normal_pdf(x, 0, 1); }, 0.0,
                                    rng, 10);
    CHECK(d.tries == 1);
  }
}

TEST_CASE("rejection: acceptance rate and tries for N(0,1) under N(0,4)") {
  Rng rng(2);
  long tries = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    tries += rejection_sample([](double x) { return suites::log_normal_pdf(x, 0, 1); },
                              [](Rng& r) { return r.normal(0, 2); },
                              [](double x) { return suites::log_normal_pdf(x, 0, 2); },
                              std::log(2.0), rng, 1000)
                 .tries;
  CHECK(static_cast<double>(draws) / tries == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("rejection: mean tries is c / P for an unnormalized target") {
  // Target 3 N(0,1) (mass P = 3) under N(0,4) needs c = 6; expected tries 2.
  Rng rng(3);
  long tries = 0;
  for (int i = 0; i < 100000; ++i)
    tries += rejection_sample([](double x) { return std::log(3.0) + suites::log_normal_pdf(x, 0, 1); },
                              [](Rng& r) { return r.normal(0, 2); },
                              [](double x) { return suites::log_normal_pdf(x, 0, 2); },
                              std::log(6.0), rng, 1000)
                 .tries;
  CHECK(tries / 100000.0 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("rejection: envelope violation and exhaustion") {
  Rng rng(4);
  CHECK_THROWS_AS(rejection_sample([](double x) { return suites::log_normal_pdf(x, 0, 1); },
                                   [](Rng& r) { return r.normal(0, 2); },
                                   [](double x) { return suites::log_normal_pdf(x, 0, 2); },
                                   std::log(1.5), rng, 100000),
                  EnvelopeViolation);
  try {
    rejection_sample([](double x) { return suites::log_normal_pdf(x, 0, 1) - 50.0; },
                     [](Rng& r) { return r.normal(0, 2); },
                     [](double x) { return suites::log_normal_pdf(x, 0, 2); }, std::log(2.0), rng, 25);
    FAIL("expected exhaustion");
  } catch (const RejectionExhausted& e) {
    CHECK(e.tries() == 25);
  }
}

TEST_CASE("rejection KS suite") {
  for (const auto& r : suites::rejection_suite(100)) {
    INFO(r.ks.name << ": KS " << r.ks.ks << " (critical " << r.ks.critical << "), tries "
                   << r.mean_tries << " vs c " << r.expected_tries);
    CHECK(r.ks.pass());
    CHECK(r.mean_tries == doctest::Approx(r.expected_tries).epsilon(0.05));
  }
}

TEST_CASE("truncated normal regimes and rates") {
  CHECK(optimal_exponential_rate(0.0) == 1.0);
  CHECK(optimal_exponential_rate(4.0) == doctest::Approx(0.5 * (4 + std::sqrt(20.0))));
  CHECK(truncated_normal_regime({0, 1, -1, 1}) == TruncNormRegime::Inversion);
  CHECK(truncated_normal_regime({0, 1, 4.5, 9}) == TruncNormRegime::RightTail);
  CHECK(truncated_normal_regime({0, 1, -9, -4.5}) == TruncNormRegime::LeftTail);
  CHECK(truncated_normal_regime({0, 1, 0, 0.1}) == TruncNormRegime::Uniform);
  CHECK(truncated_normal_regime({10, 1, -1, 1}) == TruncNormRegime::LeftTail);
  CHECK_THROWS_AS(TruncNormSpec({0, 0, -1, 1}).validate(), InvalidConfig);
  CHECK_THROWS_AS(TruncNormSpec({0, 1, 1, 1}).validate(), InvalidConfig);
}

TEST_CASE("normal quantile inverts the CDF") {
  // Lower side only: Phi(x) near 1 cannot carry the upper tail in a double.
  for (double x = -8.0; x <= 0.0; x += 0.25)
    CHECK(normal_quantile(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_cdf(0.0) == 0.5);
}

TEST_CASE("truncated normal moments") {
  Rng rng(5);
  double s = 0.0;
  for (int i = 0; i < 100000; ++i) s += sample_truncated_normal({0, 1, -1, 1}, rng);
  CHECK(std::abs(s / 100000) < 0.005);

  // Deep left tail: mean of N(10, 1) on [-1, 1] by dense integration.
  const TruncNormSpec deep{10, 1, -1, 1};
  const double num = oracle::trapezoid([](double x) { return x * std::exp(-0.5 * ((x - 10) * (x - 10) - 81)); }, -1, 1, 200000);
  const double den = oracle::trapezoid([](double x) { return std::exp(-0.5 * ((x - 10) * (x - 10) - 81)); }, -1, 1, 200000);
  double m = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double v = sample_truncated_normal(deep, rng);
    REQUIRE(v <= 1.0);
    REQUIRE(v >= -1.0);
    m += v;
  }
  CHECK(std::abs(m / 100000 - num / den) < 5e-4);
}

TEST_CASE("truncated normal KS suite") {
  for (const auto& r : suites::truncnorm_suite(200)) {
    INFO(r.ks.name << ": KS " << r.ks.ks << " (critical " << r.ks.critical << ")");
    CHECK(r.regime_ok);
    CHECK(r.in_bounds);
    CHECK(r.ks.pass());
  }
}

TEST_CASE("slice sampler KS suite") {
  for (const auto& r : suites::slice_suite(300)) {
    INFO(r.name << ": KS " << r.ks << " (critical " << r.critical << ")");
    CHECK(r.pass());
  }
}

TEST_CASE("slice sampler on a flat target uses one proposal") {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const double start = rng.uniform();
    const SliceStep step = slice_sample(start, 0.0, [](double) { return 0.0; },
                                        [](double) { return Interval{0, 1}; }, rng);
    CHECK(step.proposals == 1);
  }
}

TEST_CASE("slice sampler moments on a normal target") {
  Rng rng(7);
  SliceState st{0.0, [](double x) { return -0.5 * x * x; }, {-10, 10}};
  double s = 0.0, ss = 0.0;
  const int steps = 100000;
  for (int i = 0; i < steps; ++i) {
    st = slice_sample_step(st, rng);
    s += st.current;
    ss += st.current * st.current;
  }
  CHECK(std::abs(s / steps) < 0.01);
  CHECK(ss / steps == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("shrinkage contraction bound") {
  for (const auto& r : suites::shrinkage_suite(400)) {
    INFO("x0 at " << r.x0_fraction << ": " << r.mean_ratio << " +- " << r.stderr_);
    CHECK(r.mean_ratio >= 0.5 - 3 * r.stderr_);
    CHECK(r.mean_ratio <= 0.75 + 3 * r.stderr_);
    // Six simultaneous comparisons: 4 SE keeps the family-wise level near 1e-3.
    CHECK(std::abs(r.mean_ratio - r.exact) < 4 * r.stderr_);
  }
  const auto t = suites::shrinkage_on_target(401);
  INFO("unimodal target: " << t.mean_ratio << " +- " << t.stderr_);
  CHECK(t.mean_ratio >= 0.5 - 3 * t.stderr_);
  CHECK(t.mean_ratio <= 0.75 + 3 * t.stderr_);
}

TEST_CASE("slice errors") {
  Rng rng(8);
  // Only the current point has positive density: the bracket collapses.
  CHECK_THROWS_AS(slice_sample_step({0.25, [](double x) { return x == 0.25 ? 0.0 : -INFINITY; }, {0, 1}}, rng),
                  NumericalFailure);
  CHECK_THROWS_AS(slice_sample_step({2.0, [](double) { return 0.0; }, {0, 1}}, rng), InvalidConfig);
}

TEST_CASE("samplers are deterministic under a fixed seed") {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v;
    for (int i = 0; i < 100; ++i) {
      v.push_back(sample_truncated_normal({0.3, 0.5, -1, 1}, rng));
      v.push_back(slice_sample_step({0.0, [](double x) { return -x * x; }, {-5, 5}}, rng).current);
    }
    return v;
  };
  CHECK(run(9) == run(9));
  CHECK(run(9) != run(10));
}
