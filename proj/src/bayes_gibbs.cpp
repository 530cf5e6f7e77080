#include "jitter/bayes_gibbs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

namespace jitter {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive_noise(const ModelConfig& config) {
  if (!(config.sigma_z() > 0.0) || !(config.sigma_w() > 0.0))
    throw InvalidConfig("jitter conditional needs sigma_z > 0 and sigma_w > 0");
}

// Evaluates the z_n conditional with a reusable row buffer.
class ZConditional {
 public:
  ZConditional(int n, const ParameterVector& x, double y_n, const ModelConfig& config)
      : x_(x),
        y_(y_n),
        t_(config.sample_time(n)),
        K_(config.K()),
        inv2w_(0.5 / (config.sigma_w() * config.sigma_w())),
        inv2z_(0.5 / (config.sigma_z() * config.sigma_z())),
        log_const_(-std::log(kTwoPi * config.sigma_w() * config.sigma_z())),
        row_(config.K()) {}

  double mean(double z) const {
    psinc_row(t_ + z, K_, row_.data());
    return row_.dot(x_);
  }
  double log_likelihood_part(double z) const {
    const double r = y_ - mean(z);
    return -r * r * inv2w_;
  }
  double log_prior_part(double z) const { return -z * z * inv2z_; }
  double operator()(double z) const {
    return log_likelihood_part(z) + log_prior_part(z) + log_const_;
  }

 private:
  const ParameterVector& x_;
  double y_;
  double t_;
  int K_;
  double inv2w_;
  double inv2z_;
  double log_const_;
  mutable Vector row_;
};

double slice_draw(const ZConditional& target, double current, const ModelConfig& config, Rng& rng,
                  GibbsDiagnostics* diag, int n) {
  const SliceStep step = slice_sample(
      current, target(current), target,
      [&config](double log_u) {
        const double b = slice_bound(log_u, config);
        return Interval{-b, b};
      },
      rng);
  if (diag) {
    diag->slice_proposals += step.proposals;
    ++diag->slice_draws;
    if (n >= 0 && n < static_cast<int>(diag->z_proposals.size())) diag->z_proposals[n] += step.proposals;
  }
  return step.value;
}

}  // namespace

const char* to_string(ZSampler sampler) {
  return sampler == ZSampler::Rejection ? "rejection" : "slice";
}

void GibbsSettings::validate() const {
  if (burn_in < 0) throw InvalidConfig("burn_in must be >= 0");
  if (samples < 1) throw InvalidConfig("samples must be >= 1");
  if (rejection_max_tries < 1) throw InvalidConfig("rejection_max_tries must be >= 1");
  if (time_budget_s < 0.0) throw InvalidConfig("time budget must be >= 0");
}

double conditional_z_logdensity(double z_n, int n, const ParameterVector& x, double y_n,
                                const ModelConfig& config) {
  require_positive_noise(config);
  if (x.size() != config.K()) throw InvalidConfig("parameter vector length does not match K");
  return ZConditional(n, x, y_n, config)(z_n);
}

double slice_bound(double log_u, const ModelConfig& config) {
  const double arg =
      -2.0 * log_u - 2.0 * std::log(kTwoPi * config.sigma_w() * config.sigma_z());
  return arg > 0.0 ? config.sigma_z() * std::sqrt(arg) : 0.0;
}

double rejection_log_envelope(double y_n, double x_norm, double sigma_w) {
  const double var = sigma_w * sigma_w;
  double log_c = -0.5 * std::log(kTwoPi * var);
  const double gap = y_n * y_n - 2.0 * std::abs(y_n) * x_norm;
  if (gap > 0.0) log_c -= gap / (2.0 * var);
  return log_c;
}

double sample_z_given_rest(int n, const ParameterVector& x, double y_n, double current_z,
                           const ModelConfig& config, const GibbsSettings& settings, Rng& rng,
                           GibbsDiagnostics* diag) {
  require_positive_noise(config);
  const ZConditional target(n, x, y_n, config);
  if (diag) ++diag->z_draws;
  if (settings.z_sampler == ZSampler::Slice) return slice_draw(target, current_z, config, rng, diag, n);

  const double sz = config.sigma_z();
  const double log_c = rejection_log_envelope(y_n, x.norm(), config.sigma_w());
  const double log_norm_w = -0.5 * std::log(kTwoPi * config.sigma_w() * config.sigma_w());
  const double log_norm_z = -0.5 * std::log(kTwoPi * sz * sz);
  try {
    const RejectionDraw draw = rejection_sample(
        [&](double z) {
          return target.log_likelihood_part(z) + log_norm_w + target.log_prior_part(z) + log_norm_z;
        },
        [sz](Rng& r) { return sz * r.normal(); },
        [&](double z) { return target.log_prior_part(z) + log_norm_z; }, log_c, rng,
        settings.rejection_max_tries);
    if (diag) {
      diag->rejection_proposals += draw.tries;
      if (n >= 0 && n < static_cast<int>(diag->z_proposals.size())) diag->z_proposals[n] += draw.tries;
    }
    return draw.value;
  } catch (const RejectionExhausted& e) {
    if (diag) {
      diag->rejection_proposals += e.tries();
      ++diag->rejection_fallbacks;
      if (n >= 0 && n < static_cast<int>(diag->z_fallbacks.size())) {
        diag->z_proposals[n] += e.tries();
        ++diag->z_fallbacks[n];
      }
    }
    return slice_draw(target, current_z, config, rng, diag, n);
  }
}

XConditional x_conditional(int k, const ParameterVector& x, const ObservationMatrix& H,
                           const Vector& y, double sigma_w) {
  const auto col = H.col(k);
  const double energy = col.squaredNorm();
  if (!(energy > 0.0)) throw NumericalFailure("column " + std::to_string(k) + " of H(z) is zero");
  // y - H_{-k} x_{-k} = (y - H x) + H_k x_k
  const double proj = col.dot(y - H * x) + energy * x[k];
  return {proj / energy, sigma_w / std::sqrt(energy)};
}

namespace {

double draw_x(const XConditional& c, Rng& rng) {
  if (!(c.sigma > 0.0)) return std::clamp(c.mu, -1.0, 1.0);
  return sample_truncated_normal({c.mu, c.sigma, -1.0, 1.0}, rng);
}

}  // namespace

double sample_x_given_rest(int k, const ParameterVector& x, const JitterVector& z, const Vector& y,
                           const ModelConfig& config, Rng& rng) {
  if (k < 0 || k >= config.K()) throw InvalidConfig("coefficient index out of range");
  const ObservationMatrix H = build_observation_matrix(z, config);
  return draw_x(x_conditional(k, x, H, y, config.sigma_w()), rng);
}

GibbsResult gibbs_run(const SampleSet& samples, const GibbsSettings& settings) {
  settings.validate();
  const ModelConfig& config = samples.config;
  const int N = config.N();
  const int K = config.K();
  if (samples.y.size() != N) throw InvalidConfig("sample vector length does not match N");
  const bool sample_z = config.sigma_z() > 0.0;
  if (sample_z && !(config.sigma_w() > 0.0))
    throw InvalidConfig("Gibbs sampling of the jitter needs sigma_w > 0");

  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  Rng rng(settings.seed);
  const Vector& y = samples.y;

  ParameterVector x = ParameterVector::Zero(K);
  JitterVector z = JitterVector::Zero(N);
  ObservationMatrix H = nominal_observation_matrix(config);
  Vector residual = y;  // y - H x with x = 0
  Vector col_energy = H.colwise().squaredNorm().transpose();

  GibbsResult result;
  GibbsDiagnostics& diag = result.diagnostics;
  diag.z_proposals.assign(N, 0);
  diag.z_fallbacks.assign(N, 0);
  Vector x_sum = Vector::Zero(K);
  Vector z_sum = Vector::Zero(N);
  if (settings.store_chain) result.chain_x.emplace().reserve(settings.samples);

  Vector row(K);
  const int total = settings.burn_in + settings.samples;
  for (int it = 0; it < total; ++it) {
    if (sample_z) {
      for (int n = 0; n < N; ++n) {
        z[n] = sample_z_given_rest(n, x, y[n], z[n], config, settings, rng, &diag);
        psinc_row(config.sample_time(n) + z[n], K, row.data());
        H.row(n) = row.transpose();
      }
      col_energy = H.colwise().squaredNorm().transpose();
      residual.noalias() = y - H * x;
    }
    for (int k = 0; k < K; ++k) {
      const double energy = col_energy[k];
      if (!(energy > 0.0)) throw NumericalFailure("column " + std::to_string(k) + " of H(z) is zero");
      const XConditional c{(H.col(k).dot(residual) + energy * x[k]) / energy,
                           config.sigma_w() / std::sqrt(energy)};
      const double next = draw_x(c, rng);
      residual.noalias() -= (next - x[k]) * H.col(k);
      x[k] = next;
      ++diag.x_draws;
    }
    ++diag.iterations;
    if (it >= settings.burn_in) {
      x_sum += x;
      z_sum += z;
      if (result.chain_x) result.chain_x->push_back(x);
    }
    if (settings.time_budget_s > 0.0 &&
        std::chrono::duration<double>(Clock::now() - t0).count() > settings.time_budget_s)
      throw BudgetExceeded("Gibbs chain exceeded its time budget at iteration " +
                           std::to_string(it));
  }
  result.x_hat = x_sum / settings.samples;
  result.z_hat = z_sum / settings.samples;
  return result;
}

}  // namespace jitter
