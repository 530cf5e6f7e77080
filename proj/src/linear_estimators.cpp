#include "jitter/linear_estimators.hpp"

#include <string>

#include "jitter/errors.hpp"
#include "jitter/node_rows.hpp"

namespace jitter {

namespace {

void require_length(const Vector& y, int N) {
  if (y.size() != N)
    throw InvalidConfig("sample vector has length " + std::to_string(y.size()) + ", expected " +
                        std::to_string(N));
}

Matrix full_rank_pseudoinverse(const Matrix& A, const char* what) {
  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < A.cols())
    throw NumericalFailure(std::string(what) + " is rank deficient (rank " +
                           std::to_string(qr.rank()) + " < " + std::to_string(A.cols()) + ")");
  return qr.solve(Matrix::Identity(A.rows(), A.rows()));
}

}  // namespace

Matrix solve_gram(const Matrix& A, const Matrix& B, bool* fell_back) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() == Eigen::Success) {
    Matrix X = llt.solve(B);
    if (X.allFinite()) {
      if (fell_back) *fell_back = false;
      return X;
    }
  }
  if (fell_back) *fell_back = true;
  return A.colPivHouseholderQr().solve(B);
}

MeanObservationMatrix mean_observation_matrices(const ModelConfig& config,
                                                const QuadratureRule& rule) {
  const NodeRows rows(config, rule);
  const int N = config.N();
  const int K = config.K();
  MeanObservationMatrix out{config, Matrix(N, K), Matrix(N, N), Matrix::Zero(K, K)};
  Vector second(N);
  for (int n = 0; n < N; ++n) {
    const auto block = rows.sample(n);
    Vector mean = Vector::Zero(K);
    double sq = 0.0;
    for (int i = 0; i < rows.nodes(); ++i) {
      const double w = rows.weight(i);
      mean += w * block.row(i).transpose();
      sq += w * block.row(i).squaredNorm();
      out.EHtH.noalias() += w * block.row(i).transpose() * block.row(i);
    }
    out.EH.row(n) = mean.transpose();
    second[n] = sq;
  }
  out.EHH_t.noalias() = out.EH * out.EH.transpose();
  out.EHH_t.diagonal() = second;
  return out;
}

ParameterVector LinearEstimator::apply(const Vector& y) const {
  require_length(y, static_cast<int>(gain_.cols()));
  return gain_ * y;
}

LinearEstimator make_efficient_no_jitter(const ModelConfig& config) {
  return LinearEstimator(full_rank_pseudoinverse(nominal_observation_matrix(config), "H(0)"));
}

LinearEstimator make_linear_unbiased(const MeanObservationMatrix& means) {
  return LinearEstimator(full_rank_pseudoinverse(means.EH, "E[H(z)]"));
}

LinearEstimator make_lls_random_jitter(const MeanObservationMatrix& means, double sigma_x2) {
  if (!(sigma_x2 > 0.0)) throw InvalidConfig("prior variance must be positive");
  const double ridge = means.config.sigma_w() * means.config.sigma_w() / sigma_x2;
  Matrix system = means.EHH_t;
  system.diagonal().array() += ridge;
  // G = EH^T S^{-1}  <=>  S G^T = EH  (S symmetric).
  return LinearEstimator(solve_gram(system, means.EH).transpose());
}

LinearEstimator make_lls_no_jitter(const ModelConfig& config, double sigma_x2) {
  if (!(sigma_x2 > 0.0)) throw InvalidConfig("prior variance must be positive");
  const Matrix H0 = nominal_observation_matrix(config);
  const double ridge = config.sigma_w() * config.sigma_w() / sigma_x2;
  // H0^T (H0 H0^T + r I)^{-1} = (H0^T H0 + r I)^{-1} H0^T; the K x K side stays
  // well conditioned as r -> 0.
  Matrix system = H0.transpose() * H0;
  system.diagonal().array() += ridge;
  return LinearEstimator(solve_gram(system, H0.transpose()));
}

ParameterVector efficient_no_jitter(const SampleSet& samples) {
  return make_efficient_no_jitter(samples.config).apply(samples.y);
}

ParameterVector linear_unbiased(const SampleSet& samples, const MeanObservationMatrix& means) {
  return make_linear_unbiased(means).apply(samples.y);
}

ParameterVector lls_random_jitter(const SampleSet& samples, const MeanObservationMatrix& means,
                                  double sigma_x2) {
  return make_lls_random_jitter(means, sigma_x2).apply(samples.y);
}

ParameterVector lls_no_jitter(const SampleSet& samples, double sigma_x2) {
  return make_lls_no_jitter(samples.config, sigma_x2).apply(samples.y);
}

Matrix data_covariance(const ParameterVector& x, const MeanObservationMatrix& means,
                       const QuadratureRule& rule) {
  const ModelConfig& config = means.config;
  if (x.size() != config.K()) throw InvalidConfig("plug-in parameter vector has wrong length");
  const NodeRows rows(config, rule);
  const int N = config.N();
  Vector diag(N);
  for (int n = 0; n < N; ++n) {
    const Vector proj = rows.sample(n) * x;
    double second = 0.0;
    for (int i = 0; i < rows.nodes(); ++i) second += rows.weight(i) * proj[i] * proj[i];
    const double mean = means.EH.row(n).dot(x);
    diag[n] = second - mean * mean + config.sigma_w() * config.sigma_w();
  }
  return diag.asDiagonal();
}

ParameterVector blue(const SampleSet& samples, const ParameterVector& x_plug,
                     const MeanObservationMatrix& means, const QuadratureRule& rule) {
  require_length(samples.y, means.config.N());
  const Vector lambda = data_covariance(x_plug, means, rule).diagonal();
  if (!(lambda.minCoeff() > 0.0))
    throw NumericalFailure("data covariance is not positive definite (min diagonal " +
                           std::to_string(lambda.minCoeff()) + ")");
  const Vector inv = lambda.cwiseInverse();
  const Matrix weighted = inv.asDiagonal() * means.EH;  // Lambda^{-1} E[H]
  const Matrix normal = means.EH.transpose() * weighted;
  const Vector rhs = weighted.transpose() * samples.y;
  return solve_gram(normal, rhs);
}

}  // namespace jitter
