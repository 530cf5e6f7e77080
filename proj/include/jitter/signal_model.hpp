#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace jitter {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Signal coefficients x (length K).
using ParameterVector = Vector;
/// Per-sample timing offsets z (length N), in units of the critical sampling period.
using JitterVector = Vector;
/// Dense N x K matrix H(z).
using ObservationMatrix = Matrix;

/// Problem dimensions and noise scales shared by every estimator.
///
/// K coefficients are observed through N = M*K samples at t_n = n/M + z_n,
/// z_n ~ N(0, sigma_z^2), with additive noise w_n ~ N(0, sigma_w^2).
class ModelConfig {
 public:
  ModelConfig(int K, int M, double sigma_z, double sigma_w);

  int K() const noexcept { return K_; }
  int M() const noexcept { return M_; }
  int N() const noexcept { return K_ * M_; }
  double sigma_z() const noexcept { return sigma_z_; }
  double sigma_w() const noexcept { return sigma_w_; }

  /// Nominal sample instant of sample n.
  double sample_time(int n) const noexcept { return static_cast<double>(n) / M_; }

  bool operator==(const ModelConfig&) const = default;

 private:
  int K_;
  int M_;
  double sigma_z_;
  double sigma_w_;
};

/// Observed samples plus, for synthetic data, the hidden jitter and the
/// generating coefficients.
struct SampleSet {
  ModelConfig config;
  std::uint64_t seed = 0;
  Vector y;
  std::optional<JitterVector> z_true;
  std::optional<ParameterVector> x_true;
};

/// Periodic sinc sin(pi t) / (K sin(pi t / K)).
///
/// At the removable singularities t = jK the analytic limit (-1)^(j(K+1)) is
/// returned. For even K the kernel is K-antiperiodic: psinc(t + K) = -psinc(t).
double psinc(double t, int K) noexcept;

/// Fills out[k] = psinc(t - k, K) for k = 0..K-1 with two sincos evaluations.
void psinc_row(double t, int K, double* out) noexcept;

/// Row generator: fills the K basis values for a sample taken at time t.
using RowGenerator = std::function<void(double t, int K, double* out)>;

/// The default basis: integer shifts of the periodic sinc.
RowGenerator psinc_basis();

/// Row n of H(z) for the given jitter value z_n.
Vector observation_row(int n, double z_n, const ModelConfig& config);

/// H(z) with entries psinc_K(n/M + z_n - k).
ObservationMatrix build_observation_matrix(const JitterVector& z, const ModelConfig& config);

/// H(z) for an arbitrary basis; row n is basis(n/M + z_n).
ObservationMatrix build_observation_matrix(const JitterVector& z, const ModelConfig& config,
                                           const RowGenerator& basis);

/// H(0), the jitter-free matrix. H(0)^T H(0) = M I.
ObservationMatrix nominal_observation_matrix(const ModelConfig& config);

/// Draws z ~ N(0, sigma_z^2 I), w ~ N(0, sigma_w^2 I) from a stream seeded by
/// `seed` and returns y = H(z) x + w with z and x retained.
SampleSet generate_samples(const ParameterVector& x, const ModelConfig& config,
                           std::uint64_t seed);

/// K i.i.d. Uniform(-1, 1) coefficients.
ParameterVector draw_prior_parameters(int K, std::uint64_t seed);

/// Variance of the Uniform(-1, 1) prior.
inline constexpr double kPriorVariance = 1.0 / 3.0;

}  // namespace jitter
