#include "jitter/crb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "jitter/errors.hpp"
#include "jitter/rng.hpp"

namespace jitter {

Vector score_at_sample(double y_s, int n, const ParameterVector& x, const NodeRows& rows,
                       bool* underflow) {
  const ModelConfig& config = rows.config();
  const auto block = rows.sample(n);
  const Vector means = block * x;
  const int I = rows.nodes();
  const double var = config.sigma_w() * config.sigma_w();

  Vector logp(I);
  for (int i = 0; i < I; ++i) {
    const double r = y_s - means[i];
    logp[i] = rows.log_weight(i) - 0.5 * r * r / var;
  }
  const double peak = logp.maxCoeff();
  if (underflow) *underflow = false;
  if (!std::isfinite(peak)) {
    if (underflow) *underflow = true;
    return Vector::Zero(config.K());
  }
  Vector coeff(I);
  double total = 0.0;
  for (int i = 0; i < I; ++i) {
    const double p = std::exp(logp[i] - peak);
    total += p;
    coeff[i] = p * (y_s - means[i]);
  }
  return block.transpose() * coeff / (total * var);
}

Vector score_at_sample(double y_s, int n, const ParameterVector& x, const ModelConfig& config,
                       const QuadratureRule& rule) {
  if (!(config.sigma_w() > 0.0)) throw InvalidConfig("score requires sigma_w > 0");
  if (x.size() != config.K()) throw InvalidConfig("parameter vector length does not match K");
  if (n < 0 || n >= config.N()) throw InvalidConfig("sample index out of range");
  return score_at_sample(y_s, n, x, NodeRows(config, rule));
}

FisherEstimate fisher_information(const ParameterVector& x, const ModelConfig& config, int Ns,
                                  const QuadratureRule& rule, std::uint64_t seed) {
  if (Ns < 1) throw InvalidConfig("Ns must be >= 1");
  if (!(config.sigma_w() > 0.0)) throw InvalidConfig("Fisher information requires sigma_w > 0");
  if (x.size() != config.K()) throw InvalidConfig("parameter vector length does not match K");

  const NodeRows rows(config, rule);
  const int I = rows.nodes();
  const int K = config.K();
  std::vector<double> cdf(I);
  double acc = 0.0;
  for (int i = 0; i < I; ++i) cdf[i] = acc += rows.weight(i);

  FisherEstimate out;
  out.I_y = Matrix::Zero(K, K);
  out.Ns = Ns;
  out.quad_order = rule.order();
  out.seed = seed;

  Matrix scores(K, Ns);
  for (int n = 0; n < config.N(); ++n) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(n)}));
    const Vector means = rows.sample(n) * x;
    for (int s = 0; s < Ns; ++s) {
      const double u = rng.uniform() * acc;
      const int comp = static_cast<int>(std::min<std::ptrdiff_t>(
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), I - 1));
      const double y_s = means[comp] + config.sigma_w() * rng.normal();
      bool underflow = false;
      scores.col(s) = score_at_sample(y_s, n, x, rows, &underflow);
      if (underflow) ++out.underflows;
    }
    out.I_y.noalias() += scores * scores.transpose() / static_cast<double>(Ns);
  }
  out.I_y = 0.5 * (out.I_y + out.I_y.transpose());
  return out;
}

double crb_trace(const Matrix& fisher) {
  Eigen::LLT<Matrix> llt(fisher);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure("Fisher information estimate is singular; increase Ns");
  const Matrix inv = llt.solve(Matrix::Identity(fisher.rows(), fisher.cols()));
  const double tr = inv.trace();
  if (!std::isfinite(tr) || tr <= 0.0)
    throw NumericalFailure("Fisher information estimate is singular; increase Ns");
  return tr;
}

double crb_trace(const FisherEstimate& fisher) { return crb_trace(fisher.I_y); }

}  // namespace jitter
