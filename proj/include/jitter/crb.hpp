#pragma once

#include <cstdint>

#include "jitter/node_rows.hpp"
#include "jitter/quadrature.hpp"
#include "jitter/signal_model.hpp"

namespace jitter {

inline constexpr int kDefaultMixtureSamples = 1000;

/// Monte Carlo estimate of the Fisher information I_y(x).
struct FisherEstimate {
  Matrix I_y;
  int Ns = 0;
  int quad_order = 0;
  std::uint64_t seed = 0;
  /// Mixture draws whose score could not be evaluated (density underflow).
  long underflows = 0;
};

/// d ln p(y_n; x) / dx with p(y_n; x) replaced by its quadrature Gaussian
/// mixture: a posterior-weighted average of (y_s - h_i^T x) h_i / sigma_w^2.
/// If every mixture component underflows, returns zero and sets *underflow.
Vector score_at_sample(double y_s, int n, const ParameterVector& x, const NodeRows& rows,
                       bool* underflow = nullptr);
Vector score_at_sample(double y_s, int n, const ParameterVector& x, const ModelConfig& config,
                       const QuadratureRule& rule);

/// For every sample index n, draws Ns values from the mixture
/// sum_i w_i N(h_n(z_i)^T x, sigma_w^2) and averages the score outer products;
/// the per-index averages are summed over n. Index n uses the substream
/// derive_seed(seed, {n}). Requires sigma_w > 0 and Ns >= 1.
FisherEstimate fisher_information(const ParameterVector& x, const ModelConfig& config, int Ns,
                                  const QuadratureRule& rule, std::uint64_t seed);

/// trace(I_y^{-1}). Throws NumericalFailure if the estimate is singular.
double crb_trace(const FisherEstimate& fisher);
double crb_trace(const Matrix& fisher);

}  // namespace jitter
