#include "jitter/mcmc_kernels.hpp"

#include <algorithm>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace jitter {

void TruncNormSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InvalidConfig("truncated normal needs a finite sigma > 0");
  if (!(lo < hi)) throw InvalidConfig("truncated normal needs lo < hi");
  if (!std::isfinite(mu)) throw InvalidConfig("truncated normal needs a finite mean");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double optimal_exponential_rate(double a) { return 0.5 * (a + std::sqrt(a * a + 4.0)); }

TruncNormRegime truncated_normal_regime(const TruncNormSpec& spec) {
  const double a = (spec.lo - spec.mu) / spec.sigma;
  const double b = (spec.hi - spec.mu) / spec.sigma;
  if (b - a < kNarrowWidth) return TruncNormRegime::Uniform;
  if (a > kTailThreshold) return TruncNormRegime::RightTail;
  if (b < -kTailThreshold) return TruncNormRegime::LeftTail;
  return TruncNormRegime::Inversion;
}

namespace {

// Standard normal on [a, b] with a > 0, shifted exponential proposal.
double right_tail(double a, double b, Rng& rng) {
  const double alpha = optimal_exponential_rate(a);
  while (true) {
    const double x = a + rng.exponential(alpha);
    if (x > b) continue;
    const double d = x - alpha;
    if (rng.uniform() <= std::exp(-0.5 * d * d)) return x;
  }
}

double inversion(double a, double b, Rng& rng) {
  // Work on the lower side of zero where the CDF keeps relative precision.
  const bool flip = a >= 0.0;
  if (flip) {
    const double t = a;
    a = -b;
    b = -t;
  }
  const double pa = normal_cdf(a);
  const double pb = normal_cdf(b);
  double x = normal_quantile(pa + rng.uniform() * (pb - pa));
  x = std::clamp(x, a, b);
  return flip ? -x : x;
}

double uniform_proposal(double a, double b, Rng& rng) {
  // Envelope is the density maximum on [a, b].
  const double peak_sq = a > 0.0 ? a * a : (b < 0.0 ? b * b : 0.0);
  while (true) {
    const double x = rng.uniform(a, b);
    if (rng.uniform() <= std::exp(0.5 * (peak_sq - x * x))) return x;
  }
}

}  // namespace

double sample_truncated_normal(const TruncNormSpec& spec, Rng& rng) {
  spec.validate();
  const double a = (spec.lo - spec.mu) / spec.sigma;
  const double b = (spec.hi - spec.mu) / spec.sigma;
  double x = 0.0;
  switch (truncated_normal_regime(spec)) {
    case TruncNormRegime::Uniform:
      x = uniform_proposal(a, b, rng);
      break;
    case TruncNormRegime::RightTail:
      x = right_tail(a, b, rng);
      break;
    case TruncNormRegime::LeftTail:
      x = -right_tail(-b, -a, rng);
      break;
    case TruncNormRegime::Inversion:
      x = inversion(a, b, rng);
      break;
  }
  return std::clamp(spec.mu + spec.sigma * x, spec.lo, spec.hi);
}

SliceState slice_sample_step(const SliceState& state, Rng& rng) {
  const Interval iv = state.initial_interval;
  if (!(iv.lo <= state.current && state.current <= iv.hi))
    throw InvalidConfig("slice state lies outside its initial interval");
  const double log_current = state.log_density(state.current);
  if (!(log_current > -std::numeric_limits<double>::infinity()))
    throw InvalidConfig("slice state has zero density at the current point");
  const SliceStep step =
      slice_sample(state.current, log_current, state.log_density,
                   [iv](double) { return iv; }, rng);
  return {step.value, state.log_density, state.initial_interval};
}

}  // namespace jitter
