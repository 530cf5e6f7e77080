#include "jitter/em_ml.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "jitter/errors.hpp"
#include "jitter/linear_estimators.hpp"
#include "jitter/rng.hpp"

namespace jitter {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log N(y; m, s^2) without the normalizing constant. s == 0 is a point mass.
double log_kernel(double y, double m, double inv_two_var) {
  const double r = y - m;
  if (std::isinf(inv_two_var)) return r == 0.0 ? 0.0 : kNegInf;
  return -r * r * inv_two_var;
}

double log_norm_const(double sigma_w) {
  return sigma_w > 0.0 ? -0.5 * std::log(2.0 * std::numbers::pi * sigma_w * sigma_w) : 0.0;
}

// Posterior weights over the nodes for one sample, normalized in place.
// Returns log p(y_n; x), or -inf when every weight underflowed (in which case
// `post` holds the prior weights).
double node_posterior(double y_n, const Eigen::Ref<const Vector>& means, const NodeRows& rows,
                      double inv_two_var, double log_const, Vector& post) {
  const int I = rows.nodes();
  double peak = kNegInf;
  for (int i = 0; i < I; ++i) {
    post[i] = rows.log_weight(i) + log_kernel(y_n, means[i], inv_two_var);
    if (post[i] > peak) peak = post[i];
  }
  if (!(peak > kNegInf)) {
    for (int i = 0; i < I; ++i) post[i] = rows.weight(i);
    return kNegInf;
  }
  double total = 0.0;
  for (int i = 0; i < I; ++i) {
    post[i] = std::exp(post[i] - peak);
    total += post[i];
  }
  post /= total;
  return peak + std::log(total) + log_const;
}

double inv_two_variance(double sigma_w) {
  return sigma_w > 0.0 ? 0.5 / (sigma_w * sigma_w) : std::numeric_limits<double>::infinity();
}

void check_lengths(const Vector& y, const ParameterVector& x, const ModelConfig& config) {
  if (y.size() != config.N()) throw InvalidConfig("sample vector length does not match N");
  if (x.size() != config.K()) throw InvalidConfig("parameter vector length does not match K");
}

}  // namespace

void EmSettings::validate() const {
  if (quad_order < 1 || quad_order > kMaxQuadOrder) throw InvalidConfig("quad_order out of range");
  if (max_iters < 1) throw InvalidConfig("max_iters must be >= 1");
  if (!(tol > 0.0)) throw InvalidConfig("tol must be > 0");
  if (restarts < 0) throw InvalidConfig("restarts must be >= 0");
  if (time_budget_s < 0.0) throw InvalidConfig("time budget must be >= 0");
}

double log_singleton_likelihood(double y_n, int n, const ParameterVector& x, const NodeRows& rows) {
  const Vector means = rows.sample(n) * x;
  Vector post(rows.nodes());
  const double sw = rows.config().sigma_w();
  return node_posterior(y_n, means, rows, inv_two_variance(sw), log_norm_const(sw), post);
}

double singleton_likelihood(double y_n, int n, const ParameterVector& x,
                            const ModelConfig& config, const QuadratureRule& rule) {
  if (x.size() != config.K()) throw InvalidConfig("parameter vector length does not match K");
  if (n < 0 || n >= config.N()) throw InvalidConfig("sample index out of range");
  return std::exp(log_singleton_likelihood(y_n, n, x, NodeRows(config, rule)));
}

double log_likelihood(const Vector& y, const ParameterVector& x, const NodeRows& rows) {
  check_lengths(y, x, rows.config());
  const Vector means = rows.table() * x;
  const int I = rows.nodes();
  const double sw = rows.config().sigma_w();
  const double inv2v = inv_two_variance(sw);
  const double lc = log_norm_const(sw);
  Vector post(I);
  double total = 0.0;
  for (int n = 0; n < rows.config().N(); ++n)
    total += node_posterior(y[n], means.segment(static_cast<Eigen::Index>(n) * I, I), rows, inv2v,
                            lc, post);
  return total;
}

EStep em_e_step(const Vector& y, const ParameterVector& x_prev, const NodeRows& rows) {
  const ModelConfig& config = rows.config();
  check_lengths(y, x_prev, config);
  const int I = rows.nodes();
  const int N = config.N();
  const double sw = config.sigma_w();
  const double inv2v = inv_two_variance(sw);
  const double lc = log_norm_const(sw);

  const Vector means = rows.table() * x_prev;
  Vector resp(static_cast<Eigen::Index>(N) * I);
  Vector yw(static_cast<Eigen::Index>(N) * I);
  Vector post(I);
  EStep out;
  for (int n = 0; n < N; ++n) {
    const Eigen::Index off = static_cast<Eigen::Index>(n) * I;
    const double ll = node_posterior(y[n], means.segment(off, I), rows, inv2v, lc, post);
    if (std::isinf(ll) && ll < 0) ++out.guarded_samples;
    out.loglik += ll;
    resp.segment(off, I) = post;
    yw.segment(off, I) = y[n] * post;
  }
  out.A.noalias() = rows.table().transpose() * (resp.asDiagonal() * rows.table());
  out.A = 0.5 * (out.A + out.A.transpose());
  out.b.noalias() = rows.table().transpose() * yw;
  return out;
}

EStep em_e_step(const SampleSet& samples, const ParameterVector& x_prev,
                const QuadratureRule& rule) {
  return em_e_step(samples.y, x_prev, NodeRows(samples.config, rule));
}

namespace {

EmResult em_single(const SampleSet& samples, const EmSettings& settings, const NodeRows& rows,
                   const ParameterVector& start) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  EmResult result;
  EmTrace& trace = result.trace;
  ParameterVector x = start;
  trace.estimates.push_back(x);

  for (int it = 1; it <= settings.max_iters; ++it) {
    const EStep step = em_e_step(samples.y, x, rows);
    trace.loglik.push_back(step.loglik);
    trace.guarded_samples += step.guarded_samples;

    bool fell_back = false;
    ParameterVector next = solve_gram(step.A, step.b, &fell_back);
    if (fell_back)
      trace.warnings.push_back("iteration " + std::to_string(it) +
                               ": M-step system not positive definite, least-squares fallback");
    if (!next.allFinite()) throw NumericalFailure("EM produced a non-finite estimate");

    const double change = (next - x).norm() / std::max(x.norm(), 1.0);
    x = std::move(next);
    trace.estimates.push_back(x);
    trace.iterations_run = it;
    if (change < settings.tol) {
      trace.converged = true;
      break;
    }
    if (settings.time_budget_s > 0.0 &&
        std::chrono::duration<double>(Clock::now() - t0).count() > settings.time_budget_s)
      throw BudgetExceeded("EM exceeded its time budget after " + std::to_string(it) +
                           " iterations");
  }
  trace.loglik.push_back(log_likelihood(samples.y, x, rows));
  result.x = x;
  return result;
}

}  // namespace

EmResult em_run(const SampleSet& samples, const EmSettings& settings, const NodeRows& rows) {
  settings.validate();
  if (!(rows.config() == samples.config))
    throw InvalidConfig("node table was built for a different configuration");
  const int K = samples.config.K();
  ParameterVector start;
  if (settings.init) {
    if (settings.init->size() != K) throw InvalidConfig("EM initial point has wrong length");
    start = *settings.init;
  } else {
    start = efficient_no_jitter(samples);
  }

  EmResult best = em_single(samples, settings, rows, start);
  for (int r = 0; r < settings.restarts; ++r) {
    const ParameterVector alt_start =
        draw_prior_parameters(K, derive_seed(settings.restart_seed, {static_cast<std::uint64_t>(r)}));
    EmResult alt = em_single(samples, settings, rows, alt_start);
    if (alt.trace.loglik.back() > best.trace.loglik.back()) best = std::move(alt);
  }
  return best;
}

EmResult em_run(const SampleSet& samples, const EmSettings& settings) {
  settings.validate();
  return em_run(samples, settings, NodeRows(samples.config, gauss_hermite_rule(settings.quad_order)));
}

}  // namespace jitter
