#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jitter/node_rows.hpp"
#include "jitter/quadrature.hpp"
#include "jitter/signal_model.hpp"

namespace jitter {

struct EmSettings {
  int quad_order = kDefaultQuadOrder;
  int max_iters = 500;
  /// Stop when ||x_i - x_{i-1}|| / max(||x_{i-1}||, 1) < tol.
  double tol = 1e-8;
  /// Starting point; empty means the jitter-blind efficient linear estimate.
  std::optional<ParameterVector> init;
  /// Extra starts drawn from the Uniform(-1, 1) prior; the run with the
  /// highest final log-likelihood wins.
  int restarts = 0;
  std::uint64_t restart_seed = 0;
  /// Wall-clock budget per run in seconds; 0 disables it.
  double time_budget_s = 0.0;

  void validate() const;
};

struct EmTrace {
  /// estimates[0] is the starting point; estimates[i] the i-th M-step output.
  std::vector<ParameterVector> estimates;
  /// Quadrature log-likelihood of each entry of `estimates`.
  std::vector<double> loglik;
  int iterations_run = 0;
  bool converged = false;
  /// Samples whose posterior weights all underflowed (prior weights used).
  long guarded_samples = 0;
  std::vector<std::string> warnings;
};

struct EmResult {
  ParameterVector x;
  EmTrace trace;
};

/// Sufficient statistics of one E-step at x_prev.
struct EStep {
  Matrix A;  ///< sum_n E[h_n h_n^T | y_n; x_prev]
  Vector b;  ///< E[H | y; x_prev]^T y
  double loglik = 0.0;  ///< quadrature log p(y; x_prev)
  long guarded_samples = 0;
};

/// p(y_n; x) ~ sum_i w_i N(y_n; h_n(sigma_z x_i)^T x, sigma_w^2).
double singleton_likelihood(double y_n, int n, const ParameterVector& x,
                            const ModelConfig& config, const QuadratureRule& rule);
double log_singleton_likelihood(double y_n, int n, const ParameterVector& x, const NodeRows& rows);

/// Quadrature log p(y; x), the sum of log singleton likelihoods.
double log_likelihood(const Vector& y, const ParameterVector& x, const NodeRows& rows);

EStep em_e_step(const SampleSet& samples, const ParameterVector& x_prev, const QuadratureRule& rule);
EStep em_e_step(const Vector& y, const ParameterVector& x_prev, const NodeRows& rows);

/// ML estimate of x by EM with the jitter as missing data.
EmResult em_run(const SampleSet& samples, const EmSettings& settings = {});
/// Same, reusing a precomputed node table (its rule order overrides settings.quad_order).
EmResult em_run(const SampleSet& samples, const EmSettings& settings, const NodeRows& rows);

}  // namespace jitter
