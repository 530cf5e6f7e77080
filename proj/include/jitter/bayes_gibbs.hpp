#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "jitter/mcmc_kernels.hpp"
#include "jitter/signal_model.hpp"

namespace jitter {

enum class ZSampler { Rejection, Slice };

struct GibbsSettings {
  int burn_in = 500;
  int samples = 2000;
  ZSampler z_sampler = ZSampler::Rejection;
  /// Rejection proposals per jitter draw before falling back to slice sampling.
  long rejection_max_tries = 10000;
  std::uint64_t seed = 0;
  bool store_chain = false;
  /// Wall-clock budget per chain in seconds; 0 disables it.
  double time_budget_s = 0.0;

  void validate() const;
};

/// Sampler bookkeeping. Per-variable vectors are indexed by sample n.
struct GibbsDiagnostics {
  long iterations = 0;
  long z_draws = 0;
  long rejection_proposals = 0;
  long rejection_fallbacks = 0;
  long slice_proposals = 0;
  long slice_draws = 0;
  long x_draws = 0;
  std::vector<long> z_proposals;  ///< rejection + slice proposals per sample
  std::vector<long> z_fallbacks;  ///< rejection-to-slice fallbacks per sample
};

struct GibbsResult {
  ParameterVector x_hat;
  JitterVector z_hat;
  std::optional<std::vector<ParameterVector>> chain_x;
  GibbsDiagnostics diagnostics;
};

/// log[N(y_n; h_n(z_n)^T x, sigma_w^2) N(z_n; 0, sigma_z^2)], the unnormalized
/// full conditional of z_n. It does not depend on z_{-n}. Requires
/// sigma_z > 0 and sigma_w > 0.
double conditional_z_logdensity(double z_n, int n, const ParameterVector& x, double y_n,
                                const ModelConfig& config);

/// Half-width of the interval containing the slice at height log u:
/// sigma_z sqrt(-2 log u - 2 log(2 pi sigma_w sigma_z)) (zero if negative).
double slice_bound(double log_u, const ModelConfig& config);

/// Log of the rejection envelope constant c for proposal N(0, sigma_z^2):
/// 1/sqrt(2 pi sigma_w^2), tightened by exp(-(y^2 - 2|y| ||x||) / (2 sigma_w^2))
/// when y^2 > 2|y| ||x||.
double rejection_log_envelope(double y_n, double x_norm, double sigma_w);

/// One draw of z_n from its full conditional. Rejection mode falls back to a
/// slice step (started from current_z) after settings.rejection_max_tries.
double sample_z_given_rest(int n, const ParameterVector& x, double y_n, double current_z,
                           const ModelConfig& config, const GibbsSettings& settings, Rng& rng,
                           GibbsDiagnostics* diag = nullptr);

/// Mean and std. dev. of x_k given x_{-k}, z, y before truncation to [-1, 1].
struct XConditional {
  double mu;
  double sigma;
};
XConditional x_conditional(int k, const ParameterVector& x, const ObservationMatrix& H,
                           const Vector& y, double sigma_w);

/// One draw of x_k from N(mu_k, sigma_k^2) truncated to [-1, 1]. Only the
/// entries x_{-k} of `x` are read.
double sample_x_given_rest(int k, const ParameterVector& x, const JitterVector& z, const Vector& y,
                           const ModelConfig& config, Rng& rng);

/// Gibbs sampler over (z, x) started at z = 0, x = 0; each iteration sweeps
/// z_0..z_{N-1} then x_0..x_{K-1}. Returns the means of the post-burn-in draws.
GibbsResult gibbs_run(const SampleSet& samples, const GibbsSettings& settings = {});

const char* to_string(ZSampler sampler);

}  // namespace jitter
