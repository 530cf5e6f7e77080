#include "jitter/quadrature.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "jitter/errors.hpp"

namespace jitter {

namespace {

// Orthonormal Hermite polynomials for the standard normal weight:
//   p_0 = 1, p_{j+1} = (x p_j - sqrt(j) p_{j-1}) / sqrt(j+1).
// Returns p_n(x) and p_n'(x); also accumulates sum_{j<n} p_j(x)^2.
struct HermiteEval {
  double value;
  double derivative;
  double christoffel_sum;
};

HermiteEval orthonormal_hermite(int n, double x) {
  double prev = 0.0;
  double cur = 1.0;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    sum += cur * cur;
    const double next = (x * cur - std::sqrt(static_cast<double>(j)) * prev) /
                        std::sqrt(static_cast<double>(j + 1));
    prev = cur;
    cur = next;
  }
  // He_n' = n He_{n-1}  =>  p_n' = sqrt(n) p_{n-1}.
  return {cur, std::sqrt(static_cast<double>(n)) * prev, sum};
}

}  // namespace

QuadratureRule gauss_hermite_rule(int order) {
  if (order < 1 || order > kMaxQuadOrder)
    throw InvalidConfig("quadrature order must be in [1, " + std::to_string(kMaxQuadOrder) +
                        "], got " + std::to_string(order));
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  if (order == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 1.0;
    return rule;
  }

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = b;
    jacobi(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  if (eig.info() != Eigen::Success) throw NumericalFailure("Golub-Welsch eigensolver failed");
  const Eigen::VectorXd& values = eig.eigenvalues();  // ascending

  for (int i = 0; i < order; ++i) {
    double x = values[i];
    for (int it = 0; it < 3; ++it) {
      const HermiteEval h = orthonormal_hermite(order, x);
      if (h.derivative == 0.0) break;
      const double step = h.value / h.derivative;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / orthonormal_hermite(order, x).christoffel_sum;
  }

  // Enforce exact symmetry, then normalize to a probability vector.
  for (int i = 0; i < order / 2; ++i) {
    const int j = order - 1 - i;
    const double node = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double weight = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -node;
    rule.nodes[j] = node;
    rule.weights[i] = weight;
    rule.weights[j] = weight;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

}  // namespace jitter
