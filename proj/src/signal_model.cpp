#include "jitter/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "jitter/errors.hpp"
#include "jitter/rng.hpp"

namespace jitter {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSingularEps = 1e-9;
// Below this denominator magnitude the rotated-angle form loses digits and
// psinc_row falls back to the reduced scalar evaluation.
constexpr double kRowFallback = 1e-2;

struct ShiftTable {
  int K = 0;
  std::vector<double> cos_k;
  std::vector<double> sin_k;
};

const ShiftTable& shift_table(int K) {
  thread_local ShiftTable table;
  if (table.K != K) {
    table.K = K;
    table.cos_k.resize(K);
    table.sin_k.resize(K);
    for (int k = 0; k < K; ++k) {
      const double angle = kPi * k / K;
      table.cos_k[k] = std::cos(angle);
      table.sin_k[k] = std::sin(angle);
    }
  }
  return table;
}

}  // namespace

ModelConfig::ModelConfig(int K, int M, double sigma_z, double sigma_w)
    : K_(K), M_(M), sigma_z_(sigma_z), sigma_w_(sigma_w) {
  if (K < 1) throw InvalidConfig("K must be >= 1, got " + std::to_string(K));
  if (M < 1) throw InvalidConfig("M must be >= 1, got " + std::to_string(M));
  if (!(sigma_z >= 0.0) || !std::isfinite(sigma_z))
    throw InvalidConfig("sigma_z must be finite and >= 0");
  if (!(sigma_w >= 0.0) || !std::isfinite(sigma_w))
    throw InvalidConfig("sigma_w must be finite and >= 0");
}

double psinc(double t, int K) noexcept {
  if (K == 1) return 1.0;
  // psinc has period 2K and psinc(u + K) = (-1)^(K+1) psinc(u); reduce to
  // |u| <= K/2 so the denominator only vanishes at u = 0.
  double u = std::remainder(t, 2.0 * K);
  double sign = 1.0;
  const double half = 0.5 * K;
  if (u > half) {
    u -= K;
    if (K % 2 == 0) sign = -1.0;
  } else if (u < -half) {
    u += K;
    if (K % 2 == 0) sign = -1.0;
  }
  const double den = K * std::sin(kPi * u / K);
  if (std::abs(den) < K * kSingularEps) return sign;
  return sign * std::sin(kPi * u) / den;
}

void psinc_row(double t, int K, double* out) noexcept {
  if (K == 1) {
    out[0] = 1.0;
    return;
  }
  // Exact reduction by the 2K period keeps the angles small.
  t = std::remainder(t, 2.0 * K);
  const ShiftTable& table = shift_table(K);
  // sin(pi t) from the exact fractional part, so it stays accurate near integers.
  const double j = std::nearbyint(t);
  const double num = (std::fmod(j, 2.0) == 0.0 ? 1.0 : -1.0) * std::sin(kPi * (t - j));
  const double a = kPi * t / K;
  const double sa = std::sin(a);
  const double ca = std::cos(a);
  for (int k = 0; k < K; ++k) {
    // sin(pi (t - k) / K) by angle subtraction; sin(pi (t - k)) = (-1)^k sin(pi t).
    const double den = K * (sa * table.cos_k[k] - ca * table.sin_k[k]);
    if (std::abs(den) < kRowFallback) {
      out[k] = psinc(t - k, K);
    } else {
      out[k] = ((k & 1) ? -num : num) / den;
    }
  }
}

RowGenerator psinc_basis() {
  return [](double t, int K, double* out) { psinc_row(t, K, out); };
}

Vector observation_row(int n, double z_n, const ModelConfig& config) {
  Vector row(config.K());
  psinc_row(config.sample_time(n) + z_n, config.K(), row.data());
  return row;
}

ObservationMatrix build_observation_matrix(const JitterVector& z, const ModelConfig& config,
                                           const RowGenerator& basis) {
  if (z.size() != config.N())
    throw InvalidConfig("jitter vector has length " + std::to_string(z.size()) + ", expected N = " +
                        std::to_string(config.N()));
  const int K = config.K();
  // Row-major scratch so each generated row is contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> H(config.N(), K);
  for (int n = 0; n < config.N(); ++n) basis(config.sample_time(n) + z[n], K, H.row(n).data());
  return H;
}

ObservationMatrix build_observation_matrix(const JitterVector& z, const ModelConfig& config) {
  return build_observation_matrix(z, config, psinc_basis());
}

ObservationMatrix nominal_observation_matrix(const ModelConfig& config) {
  return build_observation_matrix(JitterVector::Zero(config.N()), config);
}

SampleSet generate_samples(const ParameterVector& x, const ModelConfig& config,
                           std::uint64_t seed) {
  if (x.size() != config.K())
    throw InvalidConfig("parameter vector has length " + std::to_string(x.size()) +
                        ", expected K = " + std::to_string(config.K()));
  Rng rng(seed);
  const int N = config.N();
  JitterVector z(N);
  for (int n = 0; n < N; ++n) z[n] = config.sigma_z() * rng.normal();
  Vector w(N);
  for (int n = 0; n < N; ++n) w[n] = config.sigma_w() * rng.normal();

  SampleSet out{config, seed, Vector(N), z, x};
  Vector row(config.K());
  for (int n = 0; n < N; ++n) {
    psinc_row(config.sample_time(n) + z[n], config.K(), row.data());
    out.y[n] = row.dot(x) + w[n];
  }
  return out;
}

ParameterVector draw_prior_parameters(int K, std::uint64_t seed) {
  if (K < 1) throw InvalidConfig("K must be >= 1");
  Rng rng(derive_seed(seed, {0x5052494FULL}));
  ParameterVector x(K);
  for (int k = 0; k < K; ++k) x[k] = rng.uniform(-1.0, 1.0);
  return x;
}

}  // namespace jitter
