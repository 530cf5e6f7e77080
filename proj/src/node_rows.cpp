#include "jitter/node_rows.hpp"

#include <cmath>

namespace jitter {

NodeRows::NodeRows(const ModelConfig& config, const QuadratureRule& rule) : config_(config) {
  if (config.sigma_z() == 0.0) {
    weights_ = {1.0};
    jitter_ = {0.0};
  } else {
    weights_ = rule.weights;
    jitter_.resize(rule.order());
    for (int i = 0; i < rule.order(); ++i) jitter_[i] = config.sigma_z() * rule.nodes[i];
  }
  log_weights_.resize(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) log_weights_[i] = std::log(weights_[i]);

  const int I = nodes();
  table_.resize(static_cast<Eigen::Index>(config.N()) * I, config.K());
  for (int n = 0; n < config.N(); ++n)
    for (int i = 0; i < I; ++i)
      psinc_row(config.sample_time(n) + jitter_[i], config.K(),
                table_.row(static_cast<Eigen::Index>(n) * I + i).data());
}

}  // namespace jitter
