#pragma once

#include <vector>

namespace jitter {

/// Gauss-Hermite rule for the standard normal weight. Weights sum to one.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int order() const noexcept { return static_cast<int>(nodes.size()); }
};

inline constexpr int kDefaultQuadOrder = 20;
inline constexpr int kMaxQuadOrder = 100;

/// Nodes are the roots of the probabilists' Hermite polynomial He_order,
/// computed with Golub-Welsch (eigenvalues of the Jacobi matrix with
/// off-diagonal sqrt(k)), then polished by Newton steps on the three-term
/// recurrence. Weights are Christoffel numbers, renormalized to sum to one.
/// Throws InvalidConfig unless 1 <= order <= 100.
QuadratureRule gauss_hermite_rule(int order);

/// sum_i w_i f(sigma x_i + mu). sigma == 0 returns f(mu).
template <class F>
double expect_gaussian(F&& f, double mu, double sigma, const QuadratureRule& rule) {
  if (sigma == 0.0) return f(mu);
  double acc = 0.0;
  for (int i = 0; i < rule.order(); ++i) acc += rule.weights[i] * f(sigma * rule.nodes[i] + mu);
  return acc;
}

}  // namespace jitter
