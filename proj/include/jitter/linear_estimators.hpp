#pragma once

#include "jitter/quadrature.hpp"
#include "jitter/signal_model.hpp"

namespace jitter {

/// Moments of H(z) under z ~ N(0, sigma_z^2 I), by per-sample quadrature.
struct MeanObservationMatrix {
  ModelConfig config;
  Matrix EH;     ///< N x K, E[H(z)]
  Matrix EHH_t;  ///< N x N, E[H(z) H(z)^T]
  Matrix EHtH;   ///< K x K, E[H(z)^T H(z)]
};

/// Diagonal blocks of E[H H^T] and E[H^T H] are single-sample quadratures;
/// off-diagonal entries of E[H H^T] are products of row means because z_n and
/// z_m are independent.
MeanObservationMatrix mean_observation_matrices(const ModelConfig& config,
                                                const QuadratureRule& rule);

/// A precomputed linear map y -> G y (G is K x N).
class LinearEstimator {
 public:
  explicit LinearEstimator(Matrix gain) : gain_(std::move(gain)) {}
  ParameterVector apply(const Vector& y) const;
  const Matrix& gain() const noexcept { return gain_; }

 private:
  Matrix gain_;
};

/// (H(0)^T H(0))^{-1} H(0)^T, efficient when there is no jitter.
LinearEstimator make_efficient_no_jitter(const ModelConfig& config);
/// pinv(E[H]). Throws NumericalFailure when E[H] loses column rank.
LinearEstimator make_linear_unbiased(const MeanObservationMatrix& means);
/// E[H]^T (E[H H^T] + (sigma_w^2 / sigma_x2) I)^{-1}.
LinearEstimator make_lls_random_jitter(const MeanObservationMatrix& means, double sigma_x2);
/// H(0)^T (H(0) H(0)^T + (sigma_w^2 / sigma_x2) I)^{-1}.
LinearEstimator make_lls_no_jitter(const ModelConfig& config, double sigma_x2);

ParameterVector efficient_no_jitter(const SampleSet& samples);
ParameterVector linear_unbiased(const SampleSet& samples, const MeanObservationMatrix& means);
ParameterVector lls_random_jitter(const SampleSet& samples, const MeanObservationMatrix& means,
                                  double sigma_x2 = kPriorVariance);
ParameterVector lls_no_jitter(const SampleSet& samples, double sigma_x2 = kPriorVariance);

/// Covariance of y for fixed x:
///   E[H x x^T H^T] - E[H] x x^T E[H]^T + sigma_w^2 I.
/// Independence of the z_n makes every off-diagonal entry cancel, so the
/// result is diagonal with entries var(h_n(z_n)^T x) + sigma_w^2.
Matrix data_covariance(const ParameterVector& x, const MeanObservationMatrix& means,
                       const QuadratureRule& rule);

/// BLUE for the random-matrix model, evaluated with the data covariance at
/// x_plug. Not a realizable estimator (the weighting needs the unknown x); it
/// is a diagnostic oracle. Throws NumericalFailure if the covariance is not PD.
ParameterVector blue(const SampleSet& samples, const ParameterVector& x_plug,
                     const MeanObservationMatrix& means, const QuadratureRule& rule);

/// Solves the symmetric system A X = B with Cholesky, falling back to a
/// column-pivoted least-squares solve. Sets *fell_back when the fallback ran.
Matrix solve_gram(const Matrix& A, const Matrix& B, bool* fell_back = nullptr);

}  // namespace jitter
