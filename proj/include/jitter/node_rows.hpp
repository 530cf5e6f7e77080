#pragma once

#include <Eigen/Dense>

#include "jitter/quadrature.hpp"
#include "jitter/signal_model.hpp"

namespace jitter {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Observation rows h_n(sigma_z * x_i) at every sample n and quadrature node i.
///
/// These are fixed for a given (config, rule), so the E-step, the singleton
/// likelihoods and the Fisher information all share one table. When
/// sigma_z == 0 the rule collapses to the single node z = 0 with weight 1.
class NodeRows {
 public:
  NodeRows(const ModelConfig& config, const QuadratureRule& rule);

  const ModelConfig& config() const noexcept { return config_; }
  int nodes() const noexcept { return static_cast<int>(weights_.size()); }
  double weight(int i) const noexcept { return weights_[i]; }
  double log_weight(int i) const noexcept { return log_weights_[i]; }
  double jitter(int i) const noexcept { return jitter_[i]; }

  /// I x K block of rows for sample n.
  auto sample(int n) const { return table_.middleRows(static_cast<Eigen::Index>(n) * nodes(), nodes()); }
  /// All N*I rows stacked sample-major.
  const RowMajorMatrix& table() const noexcept { return table_; }

 private:
  ModelConfig config_;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
  std::vector<double> jitter_;
  RowMajorMatrix table_;
};

}  // namespace jitter
