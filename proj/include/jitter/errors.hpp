#pragma once

#include <stdexcept>
#include <string>

namespace jitter {

// Bad dimensions, out-of-range knobs, malformed input files.
class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Singular systems, non-PD covariances, irrecoverable underflow.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two MSE curves that never reach a common level.
class NoComparableRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A rejection sampler ran out of proposals before accepting one.
class RejectionExhausted : public std::runtime_error {
 public:
  explicit RejectionExhausted(long tries)
      : std::runtime_error("rejection sampler exhausted after " + std::to_string(tries) +
                           " proposals"),
        tries_(tries) {}
  long tries() const noexcept { return tries_; }

 private:
  long tries_;
};

// A per-trial estimator time budget was exceeded.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jitter
