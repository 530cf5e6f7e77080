#pragma once

// Distribution checks for the one-dimensional samplers, shared by the unit
// tests and the acceptance binary. Every oracle CDF is tabulated from the
// unnormalized density on a dense grid.

#include <cmath>
#include <string>
#include <vector>

#include "jitter/mcmc_kernels.hpp"
#include "jitter/rng.hpp"
#include "oracles.hpp"

namespace suites {

inline constexpr std::size_t kDraws = 100000;
inline constexpr int kGrid = 200000;

struct KsResult {
  std::string name;
  double ks;
  double critical;
  bool pass() const { return ks < critical; }
};

inline KsResult make_result(std::string name, const std::vector<double>& draws,
                            const oracle::GridCdf& cdf) {
  return {std::move(name), oracle::ks_distance(draws, cdf), oracle::ks_critical_001(draws.size())};
}

inline double log_normal_pdf(double x, double m, double s) {
  const double r = (x - m) / s;
  return -0.5 * r * r - std::log(std::sqrt(2.0 * oracle::kPi) * s);
}

inline double log_upper_tail(double a) { return std::log(0.5 * std::erfc(a / std::sqrt(2.0))); }

// ---------------------------------------------------------------------------
// Rejection sampling

struct RejectionCase {
  std::string name;
  std::function<double(double)> log_target;  // normalized
  std::function<double(jitter::Rng&)> propose;
  std::function<double(double)> log_proposal;
  double log_c;
  double lo, hi;  // support used for the oracle grid
};

inline std::vector<RejectionCase> rejection_cases() {
  std::vector<RejectionCase> cases;
  // Center: N(0, 1) under N(0, 4), c = 2.
  cases.push_back({"center N(0,1) | N(0,4)", [](double x) { return log_normal_pdf(x, 0, 1); },
                   [](jitter::Rng& r) { return r.normal(0, 2); },
                   [](double x) { return log_normal_pdf(x, 0, 2); }, std::log(2.0), -8, 8});
  // Narrow: N(0, 0.1^2) under N(0, 1), c = 10.
  cases.push_back({"narrow N(0,0.01) | N(0,1)", [](double x) { return log_normal_pdf(x, 0, 0.1); },
                   [](jitter::Rng& r) { return r.normal(); },
                   [](double x) { return log_normal_pdf(x, 0, 1); }, std::log(10.0), -1, 1});
  // Wide: bimodal mixture under N(0, 9); c from a dense sup with 1% slack.
  {
    auto lt = [](double x) {
      return std::log(0.4 * std::exp(log_normal_pdf(x, -1.5, 0.6)) +
                      0.6 * std::exp(log_normal_pdf(x, 2.0, 1.0)));
    };
    auto lq = [](double x) { return log_normal_pdf(x, 0, 3); };
    double sup = -INFINITY;
    for (double x = -15; x <= 15; x += 1e-4) sup = std::max(sup, lt(x) - lq(x));
    cases.push_back({"wide mixture | N(0,9)", lt, [](jitter::Rng& r) { return r.normal(0, 3); }, lq,
                     sup + std::log(1.01), -8, 9});
  }
  // Near tail: N(0,1) restricted to x > 2 under 2 + Exp(2).
  {
    const double a = 2.0;
    auto lt = [a](double x) { return x < a ? -INFINITY : log_normal_pdf(x, 0, 1) - log_upper_tail(a); };
    auto lq = [a](double x) { return x < a ? -INFINITY : std::log(a) - a * (x - a); };
    cases.push_back({"near tail x>2 | 2+Exp(2)", lt, [a](jitter::Rng& r) { return a + r.exponential(a); },
                     lq, lt(a) - lq(a), a, a + 8});
  }
  // Far tail: N(0,1) restricted to x > 5 under 5 + Exp(alpha*).
  {
    const double a = 5.0;
    const double alpha = jitter::optimal_exponential_rate(a);
    auto lt = [a](double x) { return x < a ? -INFINITY : log_normal_pdf(x, 0, 1) - log_upper_tail(a); };
    auto lq = [a, alpha](double x) { return x < a ? -INFINITY : std::log(alpha) - alpha * (x - a); };
    cases.push_back({"far tail x>5 | 5+Exp(a*)", lt,
                     [a, alpha](jitter::Rng& r) { return a + r.exponential(alpha); }, lq,
                     lt(alpha) - lq(alpha), a, a + 4});
  }
  return cases;
}

struct RejectionStats {
  KsResult ks;
  double mean_tries;
  double expected_tries;  // c / P with P = 1 for normalized targets
};

inline std::vector<RejectionStats> rejection_suite(std::uint64_t seed) {
  std::vector<RejectionStats> out;
  int idx = 0;
  for (const RejectionCase& c : rejection_cases()) {
    jitter::Rng rng(jitter::derive_seed(seed, {static_cast<std::uint64_t>(idx++)}));
    std::vector<double> draws;
    long tries = 0;
    for (std::size_t i = 0; i < kDraws; ++i) {
      const auto d = jitter::rejection_sample(c.log_target, c.propose, c.log_proposal, c.log_c, rng,
                                              1000000);
      draws.push_back(d.value);
      tries += d.tries;
    }
    const auto lt = c.log_target;
    const oracle::GridCdf cdf([&](double x) { return std::exp(lt(x)); }, c.lo, c.hi, kGrid);
    out.push_back({make_result(c.name, draws, cdf), static_cast<double>(tries) / kDraws,
                   std::exp(c.log_c)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truncated normal

struct TruncCase {
  std::string name;
  jitter::TruncNormSpec spec;
  jitter::TruncNormRegime regime;
};

inline std::vector<TruncCase> truncnorm_cases() {
  using R = jitter::TruncNormRegime;
  return {
      {"inversion center [-1,1]", {0, 1, -1, 1}, R::Inversion},
      {"inversion near tail [1.5,3.5]", {0, 1, 1.5, 3.5}, R::Inversion},
      {"inversion far side [3.9,9]", {0, 1, 3.9, 9}, R::Inversion},
      {"inversion narrow [0.3,0.6]", {0, 1, 0.3, 0.6}, R::Inversion},
      {"inversion wide [-30,30] mu=2 s=3", {2, 3, -30, 30}, R::Inversion},
      {"right tail a=4.2 b=4.8", {0, 1, 4.2, 4.8}, R::RightTail},
      {"right tail a=5 b=50", {0, 1, 5, 50}, R::RightTail},
      {"right tail a=12 b=13", {0, 1, 12, 13}, R::RightTail},
      {"right tail a=40 b=41", {0, 1, 40, 41}, R::RightTail},
      {"right tail mu=-5 s=0.1 [-1,1]", {-5, 0.1, -1, 1}, R::RightTail},
      {"left tail mu=10 s=1 [-1,1]", {10, 1, -1, 1}, R::LeftTail},
      {"left tail mu=5 s=0.1 [-1,1]", {5, 0.1, -1, 1}, R::LeftTail},
      {"left tail b=-4.2 a=-4.8", {0, 1, -4.8, -4.2}, R::LeftTail},
      {"left tail b=-6 a=-60", {0, 1, -60, -6}, R::LeftTail},
      {"left tail mu=3 s=0.5 [-1,0.5]", {3, 0.5, -1, 0.5}, R::LeftTail},
      {"uniform center [-0.05,0.05]", {0, 1, -0.05, 0.05}, R::Uniform},
      {"uniform near tail [2,2.15]", {0, 1, 2, 2.15}, R::Uniform},
      {"uniform far tail [10,10.1]", {0, 1, 10, 10.1}, R::Uniform},
      {"uniform left far [-30.1,-30]", {0, 1, -30.1, -30}, R::Uniform},
      {"uniform x-step mu=0.3 s=20 [-1,1]", {0.3, 20, -1, 1}, R::Uniform},
  };
}

inline oracle::GridCdf truncnorm_cdf(const jitter::TruncNormSpec& s) {
  // Density relative to its maximum on [lo, hi], so deep tails do not underflow.
  const double peak = std::clamp(s.mu, s.lo, s.hi);
  const double rp = (peak - s.mu) / s.sigma;
  return oracle::GridCdf(
      [=](double x) {
        const double r = (x - s.mu) / s.sigma;
        return std::exp(-0.5 * (r * r - rp * rp));
      },
      s.lo, s.hi, kGrid);
}

struct TruncStats {
  KsResult ks;
  bool regime_ok;
  bool in_bounds;
};

inline std::vector<TruncStats> truncnorm_suite(std::uint64_t seed) {
  std::vector<TruncStats> out;
  int idx = 0;
  for (const TruncCase& c : truncnorm_cases()) {
    jitter::Rng rng(jitter::derive_seed(seed, {static_cast<std::uint64_t>(idx++)}));
    std::vector<double> draws;
    bool in_bounds = true;
    for (std::size_t i = 0; i < kDraws; ++i) {
      const double v = jitter::sample_truncated_normal(c.spec, rng);
      in_bounds = in_bounds && v >= c.spec.lo && v <= c.spec.hi;
      draws.push_back(v);
    }
    out.push_back({make_result(c.name, draws, truncnorm_cdf(c.spec)),
                   jitter::truncated_normal_regime(c.spec) == c.regime, in_bounds});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Slice sampling

struct SliceCase {
  std::string name;
  std::function<double(double)> log_density;  // unnormalized
  jitter::Interval interval;
  double start;
};

inline std::vector<SliceCase> slice_cases() {
  return {
      {"center N(0,1) on [-10,10]", [](double x) { return -0.5 * x * x; }, {-10, 10}, 0.0},
      {"flat on [0,1]", [](double) { return 0.0; }, {0, 1}, 0.5},
      {"narrow N(0,0.02^2) on [-1,1]", [](double x) { return -0.5 * x * x / 4e-4; }, {-1, 1}, 0.0},
      {"far tail N(0,1) on [3,8]", [](double x) { return -0.5 * x * x; }, {3, 8}, 3.5},
      {"wide bimodal on [-12,12]",
       [](double x) {
         return std::log(0.5 * std::exp(-0.5 * (x + 4) * (x + 4)) + 0.5 * std::exp(-0.5 * (x - 4) * (x - 4) / 4));
       },
       {-12, 12}, -4.0},
  };
}

inline constexpr int kSliceThin = 5;

inline std::vector<KsResult> slice_suite(std::uint64_t seed) {
  std::vector<KsResult> out;
  int idx = 0;
  for (const SliceCase& c : slice_cases()) {
    jitter::Rng rng(jitter::derive_seed(seed, {static_cast<std::uint64_t>(idx++)}));
    jitter::SliceState state{c.start, c.log_density, c.interval};
    std::vector<double> draws;
    for (int i = 0; i < 1000; ++i) state = jitter::slice_sample_step(state, rng);
    while (draws.size() < kDraws) {
      for (int t = 0; t < kSliceThin; ++t) state = jitter::slice_sample_step(state, rng);
      draws.push_back(state.current);
    }
    const auto ld = c.log_density;
    const oracle::GridCdf cdf([&](double x) { return std::exp(ld(x)); }, c.interval.lo,
                              c.interval.hi, kGrid);
    out.push_back(make_result(c.name, draws, cdf));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shrinkage contraction

struct ShrinkStats {
  double x0_fraction;  // position of x0 within [L, R]
  double mean_ratio;   // E[(R' - L') / (R - L)]
  double stderr_;
  double exact;        // 1 - ((R-x0)^2 + (x0-L)^2) / (2 (R-L)^2)
};

/// One shrinkage iteration from fixed (L, R, x0) with the proposal treated as
/// rejected, repeated `reps` times.
inline std::vector<ShrinkStats> shrinkage_suite(std::uint64_t seed, int reps = 100000) {
  std::vector<ShrinkStats> out;
  const double L = -1.3, R = 2.1;
  int idx = 0;
  for (double f : {0.0, 0.1, 0.3, 0.5, 0.8, 1.0}) {
    jitter::Rng rng(jitter::derive_seed(seed, {static_cast<std::uint64_t>(idx++)}));
    const double x0 = L + f * (R - L);
    std::vector<double> ratios;
    for (int i = 0; i < reps; ++i) {
      const double x1 = rng.uniform(L, R);
      const jitter::Interval next = jitter::shrink_interval({L, R}, x0, x1);
      ratios.push_back(next.width() / (R - L));
    }
    const auto ms = oracle::mean_stderr(ratios);
    const double exact = 1.0 - ((R - x0) * (R - x0) + (x0 - L) * (x0 - L)) / (2 * (R - L) * (R - L));
    out.push_back({f, ms.mean, ms.stderr_, exact});
  }
  return out;
}

/// Contraction along real slice steps on a unimodal target: each shrinkage
/// iteration is recorded with the proposal it would make from the current
/// (L, R, x0), whether or not that proposal ends up inside the slice.
inline ShrinkStats shrinkage_on_target(std::uint64_t seed, int iterations = 100000) {
  jitter::Rng rng(seed);
  jitter::Rng probe(jitter::derive_seed(seed, {1}));
  auto logp = [](double x) { return -0.5 * x * x; };
  double x = 0.0;
  std::vector<double> ratios;
  while (static_cast<int>(ratios.size()) < iterations) {
    const double log_u = logp(x) + std::log(rng.uniform());
    jitter::Interval iv{-10, 10};
    while (true) {
      const double p = probe.uniform(iv.lo, iv.hi);
      ratios.push_back(jitter::shrink_interval(iv, x, p).width() / iv.width());
      const double cand = rng.uniform(iv.lo, iv.hi);
      if (logp(cand) >= log_u) {
        x = cand;
        break;
      }
      iv = jitter::shrink_interval(iv, x, cand);
    }
  }
  const auto ms = oracle::mean_stderr(ratios);
  return {-1.0, ms.mean, ms.stderr_, NAN};
}

}  // namespace suites
