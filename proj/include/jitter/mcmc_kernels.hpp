#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "jitter/errors.hpp"
#include "jitter/rng.hpp"

namespace jitter {

using LogDensity = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Rejection sampling

/// The envelope c q(x) >= p(x) was found to fail at a proposed point.
class EnvelopeViolation : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

struct RejectionDraw {
  double value;
  long tries;  ///< proposals consumed, including the accepted one
};

inline constexpr double kEnvelopeSlack = 1e-9;

/// Draws from the normalized target by proposing from q and accepting with
/// probability p(x) / (c q(x)), all in log space. Throws EnvelopeViolation if
/// the log acceptance ratio exceeds 0 by more than 1e-9, and
/// RejectionExhausted after max_tries proposals.
template <class LogTarget, class Propose, class LogProposal>
RejectionDraw rejection_sample(LogTarget&& log_target, Propose&& propose,
                               LogProposal&& log_proposal, double log_c, Rng& rng,
                               long max_tries) {
  for (long t = 1; t <= max_tries; ++t) {
    const double x = propose(rng);
    const double log_ratio = log_target(x) - log_c - log_proposal(x);
    if (log_ratio > kEnvelopeSlack)
      throw EnvelopeViolation("rejection envelope violated at x = " + std::to_string(x) +
                              " (log ratio " + std::to_string(log_ratio) + ")");
    if (std::log(rng.uniform()) <= log_ratio) return {x, t};
  }
  throw RejectionExhausted(max_tries);
}

// ---------------------------------------------------------------------------
// Truncated normal

/// N(mu, sigma^2) restricted to [lo, hi].
struct TruncNormSpec {
  double mu = 0.0;
  double sigma = 1.0;
  double lo = -1.0;
  double hi = 1.0;

  void validate() const;
};

enum class TruncNormRegime {
  Inversion,  ///< standardized interval overlaps [-4, 4]
  RightTail,  ///< a > 4: shifted exponential proposal
  LeftTail,   ///< b < -4: mirrored shifted exponential proposal
  Uniform,    ///< standardized width < 0.2: uniform proposal
};

inline constexpr double kTailThreshold = 4.0;
inline constexpr double kNarrowWidth = 0.2;

TruncNormRegime truncated_normal_regime(const TruncNormSpec& spec);

/// Rate of the exponential proposal for the standard normal tail beyond a:
/// (a + sqrt(a^2 + 4)) / 2.
double optimal_exponential_rate(double a);

/// Exact draw from the truncated normal; the regime is picked automatically.
double sample_truncated_normal(const TruncNormSpec& spec, Rng& rng);

/// Standard normal CDF and quantile.
double normal_cdf(double x);
double normal_quantile(double p);

// ---------------------------------------------------------------------------
// Slice sampling with shrinkage

struct Interval {
  double lo;
  double hi;
  double width() const { return hi - lo; }
};

/// One slice-sampling state. log_density is an unnormalized log target.
struct SliceState {
  double current;
  LogDensity log_density;
  Interval initial_interval;
};

struct SliceStep {
  double value;
  double log_level;   ///< log u, the slice height
  int proposals = 0;  ///< uniform draws, including the accepted one
  Interval bracket;   ///< initial interval used for this step
};

inline constexpr double kMinSliceWidth = 1e-15;

/// Shrinks [lo, hi] towards `current` after `rejected` fell outside the slice.
inline Interval shrink_interval(Interval iv, double current, double rejected) {
  if (rejected < current)
    iv.lo = rejected;
  else
    iv.hi = rejected;
  return iv;
}

/// Core shrinkage step. `bracket(log_u)` returns an interval that contains
/// the whole slice {x : log_density(x) >= log_u}.
template <class LogDens, class Bracket>
SliceStep slice_sample(double current, double log_current, LogDens&& log_density,
                       Bracket&& bracket, Rng& rng) {
  SliceStep step;
  step.log_level = log_current + std::log(rng.uniform());
  step.bracket = bracket(step.log_level);
  Interval iv = step.bracket;
  while (true) {
    if (!(iv.width() >= kMinSliceWidth))
      throw NumericalFailure("slice interval collapsed below 1e-15 without acceptance at x = " +
                             std::to_string(current));
    const double x = rng.uniform(iv.lo, iv.hi);
    ++step.proposals;
    if (log_density(x) >= step.log_level) {
      step.value = x;
      return step;
    }
    iv = shrink_interval(iv, current, x);
  }
}

/// One slice step from a fixed initial interval; returns the successor state.
SliceState slice_sample_step(const SliceState& state, Rng& rng);

}  // namespace jitter
