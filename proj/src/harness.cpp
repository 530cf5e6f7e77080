#include "jitter/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <charconv>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "jitter/crb.hpp"
#include "jitter/errors.hpp"
#include "jitter/linear_estimators.hpp"
#include "jitter/node_rows.hpp"
#include "jitter/rng.hpp"

namespace jitter {

namespace {

struct EstimatorName {
  EstimatorId id;
  std::string_view name;
};

constexpr EstimatorName kNames[] = {
    {EstimatorId::EfficientNoJitter, "efficient-no-jitter"},
    {EstimatorId::LinearUnbiased, "linear-unbiased"},
    {EstimatorId::LlsNoJitter, "lls-no-jitter"},
    {EstimatorId::LlsRandomJitter, "lls-random-jitter"},
    {EstimatorId::Em, "em"},
    {EstimatorId::GibbsRejection, "gibbs-rejection"},
    {EstimatorId::GibbsSlice, "gibbs-slice"},
    {EstimatorId::Crb, "crb"},
};

constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t hash_vector(const Vector& v) {
  return fnv1a(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

// Everything about a cell that does not depend on the trial.
struct CellContext {
  ModelConfig config;
  QuadratureRule rule;
  std::optional<NodeRows> rows;
  std::map<EstimatorId, LinearEstimator> linear;
  std::map<EstimatorId, std::string> setup_errors;
};

bool is_linear(EstimatorId id) {
  return id == EstimatorId::EfficientNoJitter || id == EstimatorId::LinearUnbiased ||
         id == EstimatorId::LlsNoJitter || id == EstimatorId::LlsRandomJitter;
}

CellContext make_context(const ModelConfig& config, const SweepSpec& spec) {
  CellContext ctx{config, gauss_hermite_rule(spec.options.quad_order), std::nullopt, {}, {}};
  std::optional<MeanObservationMatrix> means;
  for (EstimatorId id : spec.estimators) {
    try {
      switch (id) {
        case EstimatorId::EfficientNoJitter:
          ctx.linear.emplace(id, make_efficient_no_jitter(config));
          break;
        case EstimatorId::LinearUnbiased:
          if (!means) means = mean_observation_matrices(config, ctx.rule);
          ctx.linear.emplace(id, make_linear_unbiased(*means));
          break;
        case EstimatorId::LlsNoJitter:
          ctx.linear.emplace(id, make_lls_no_jitter(config, spec.options.sigma_x2));
          break;
        case EstimatorId::LlsRandomJitter:
          if (!means) means = mean_observation_matrices(config, ctx.rule);
          ctx.linear.emplace(id, make_lls_random_jitter(*means, spec.options.sigma_x2));
          break;
        case EstimatorId::Em:
          if (!ctx.rows) ctx.rows.emplace(config, ctx.rule);
          break;
        default:
          break;
      }
    } catch (const std::exception& e) {
      ctx.setup_errors[id] = e.what();
    }
  }
  return ctx;
}

// Squared error of one estimator on one trial (or the CRB at the trial's x).
double evaluate(EstimatorId id, const CellContext& ctx, const SampleSet& data,
                const ParameterVector& x, std::uint64_t trial_seed, const EstimatorOptions& opt) {
  if (auto it = ctx.setup_errors.find(id); it != ctx.setup_errors.end())
    throw NumericalFailure(it->second);
  if (is_linear(id)) return (ctx.linear.at(id).apply(data.y) - x).squaredNorm();
  switch (id) {
    case EstimatorId::Em: {
      EmSettings s;
      s.quad_order = opt.quad_order;
      s.max_iters = opt.em_max_iters;
      s.tol = opt.em_tol;
      s.restarts = opt.em_restarts;
      s.restart_seed = derive_seed(trial_seed, {5});
      s.time_budget_s = opt.time_budget_s;
      return (em_run(data, s, *ctx.rows).x - x).squaredNorm();
    }
    case EstimatorId::GibbsRejection:
    case EstimatorId::GibbsSlice: {
      GibbsSettings s;
      s.burn_in = opt.burn_in;
      s.samples = opt.samples;
      s.rejection_max_tries = opt.rejection_max_tries;
      s.z_sampler = id == EstimatorId::GibbsSlice ? ZSampler::Slice : ZSampler::Rejection;
      s.seed = derive_seed(trial_seed, {3});
      s.time_budget_s = opt.time_budget_s;
      return (gibbs_run(data, s).x_hat - x).squaredNorm();
    }
    case EstimatorId::Crb:
      return crb_trace(
          fisher_information(x, ctx.config, opt.crb_ns, ctx.rule, derive_seed(trial_seed, {4})));
    default:
      throw InvalidConfig("unhandled estimator");
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  // Shortest form that parses back to the same double.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw InvalidConfig("malformed number '" + s + "'");
  return v;
}

}  // namespace

std::string_view to_string(EstimatorId id) {
  for (const auto& e : kNames)
    if (e.id == id) return e.name;
  return "unknown";
}

EstimatorId parse_estimator(std::string_view name) {
  for (const auto& e : kNames)
    if (e.name == name) return e.id;
  throw InvalidConfig("unknown estimator '" + std::string(name) + "'");
}

const std::vector<EstimatorId>& all_estimators() {
  static const std::vector<EstimatorId> ids = [] {
    std::vector<EstimatorId> v;
    for (const auto& e : kNames) v.push_back(e.id);
    return v;
  }();
  return ids;
}

void SweepSpec::validate() const {
  if (K < 1) throw InvalidConfig("K must be >= 1");
  if (trials < 1) throw InvalidConfig("trials must be >= 1");
  if (M_list.empty() || sigma_z_list.empty() || sigma_w_list.empty() || estimators.empty())
    throw InvalidConfig("sweep lists must be nonempty");
  for (int M : M_list)
    if (M < 1) throw InvalidConfig("every M must be >= 1");
  for (double sz : sigma_z_list) {
    if (!(sz >= 0.0)) throw InvalidConfig("sigma_z values must be >= 0");
    if (!allow_large_sigma_z && sz > kMaxSweepSigmaZ)
      throw InvalidConfig("sigma_z values are capped at 0.5 (set allow_large_sigma_z to lift)");
  }
  for (double sw : sigma_w_list)
    if (!(sw >= 0.0)) throw InvalidConfig("sigma_w values must be >= 0");
  if (options.quad_order < 1 || options.quad_order > kMaxQuadOrder)
    throw InvalidConfig("quad_order out of range");
  if (options.crb_ns < 1) throw InvalidConfig("crb_ns must be >= 1");
  if (!(options.sigma_x2 > 0.0)) throw InvalidConfig("sigma_x2 must be > 0");
}

std::uint64_t slice_seed(std::uint64_t master_seed, int M, double sigma_w) {
  return derive_seed(master_seed,
                     {static_cast<std::uint64_t>(M), std::bit_cast<std::uint64_t>(sigma_w)});
}

ExperimentReport run_sweep(const SweepSpec& spec) {
  spec.validate();
  struct Cell {
    int M;
    double sigma_w;
    double sigma_z;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int M : spec.M_list)
    for (double sw : spec.sigma_w_list)
      for (double sz : spec.sigma_z_list) cells.push_back({M, sw, sz, slice_seed(spec.master_seed, M, sw)});

  const std::size_t E = spec.estimators.size();
  const std::size_t T = static_cast<std::size_t>(spec.trials);
  const std::size_t stride = E * T;
  std::vector<double> values(cells.size() * stride, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> seconds(cells.size() * stride, 0.0);
  std::vector<std::uint64_t> hashes(cells.size() * stride, 0);
  std::vector<std::string> errors(cells.size() * stride);

  std::vector<std::optional<CellContext>> contexts(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c)
    contexts[c].emplace(make_context(ModelConfig(spec.K, cells[c].M, cells[c].sigma_z, cells[c].sigma_w), spec));

  std::atomic<std::size_t> next{0};
  const std::size_t jobs = cells.size() * T;
  auto worker = [&] {
    using Clock = std::chrono::steady_clock;
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t c = job / T;
      const std::size_t t = job % T;
      const CellContext& ctx = *contexts[c];
      const std::uint64_t trial_seed = derive_seed(cells[c].seed, {t});
      const ParameterVector x = draw_prior_parameters(spec.K, derive_seed(trial_seed, {1}));
      const SampleSet data = generate_samples(x, ctx.config, derive_seed(trial_seed, {2}));
      for (std::size_t e = 0; e < E; ++e) {
        const std::size_t slot = c * stride + e * T + t;
        hashes[slot] = hash_vector(data.y);
        const auto t0 = Clock::now();
        try {
          values[slot] = evaluate(spec.estimators[e], ctx, data, x, trial_seed, spec.options);
        } catch (const std::exception& ex) {
          errors[slot] = ex.what();
        }
        seconds[slot] = std::chrono::duration<double>(Clock::now() - t0).count();
      }
    }
  };
  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  // Reduce in (cell, estimator, trial) order regardless of completion order.
  ExperimentReport report;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t e = 0; e < E; ++e) {
      ReportRow row{spec.estimators[e], spec.K, cells[c].M, cells[c].sigma_z, cells[c].sigma_w,
                    spec.trials, 0.0, 0.0, 0, 0.0, cells[c].seed};
      std::uint64_t digest = kFnvOffset;
      double sum = 0.0;
      double sum_sq = 0.0;
      int ok = 0;
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t slot = c * stride + e * T + t;
        digest = fnv1a(&hashes[slot], sizeof(std::uint64_t), digest);
        row.wall_time_s += seconds[slot];
        const double v = values[slot];
        if (std::isfinite(v)) {
          sum += v;
          sum_sq += v * v;
          ++ok;
        } else {
          ++row.failures;
          if (!errors[slot].empty() && report.failure_messages.size() < 100)
            report.failure_messages.push_back(std::string(to_string(row.estimator)) + " M=" +
                                              std::to_string(row.M) + " sigma_z=" +
                                              format_double(row.sigma_z) + " trial " +
                                              std::to_string(t) + ": " + errors[slot]);
        }
      }
      if (ok > 0) {
        row.mse_mean = sum / ok;
        const double var = ok > 1 ? std::max(0.0, (sum_sq - ok * row.mse_mean * row.mse_mean) / (ok - 1)) : 0.0;
        row.mse_stderr = std::sqrt(var / ok);
      } else {
        row.mse_mean = row.mse_stderr = std::numeric_limits<double>::quiet_NaN();
      }
      report.rows.push_back(row);
      report.digests.push_back({row.estimator, row.M, row.sigma_z, row.sigma_w, digest});
    }
  }
  return report;
}

void write_csv(const ExperimentReport& report, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const ReportRow& r : report.rows) {
    out << to_string(r.estimator) << ',' << r.K << ',' << r.M << ',' << format_double(r.sigma_z)
        << ',' << format_double(r.sigma_w) << ',' << r.trials << ',' << format_double(r.mse_mean)
        << ',' << format_double(r.mse_stderr) << ',' << r.failures << ','
        << format_double(r.wall_time_s) << ',' << r.seed << '\n';
  }
}

ExperimentReport read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidConfig("empty report");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw InvalidConfig("unexpected report header: " + line);
  ExperimentReport report;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11)
      throw InvalidConfig("report line " + std::to_string(lineno) + " has " +
                          std::to_string(f.size()) + " fields, expected 11");
    try {
      ReportRow r;
      r.estimator = parse_estimator(f[0]);
      r.K = std::stoi(f[1]);
      r.M = std::stoi(f[2]);
      r.sigma_z = parse_double(f[3]);
      r.sigma_w = parse_double(f[4]);
      r.trials = std::stoi(f[5]);
      r.mse_mean = parse_double(f[6]);
      r.mse_stderr = parse_double(f[7]);
      r.failures = std::stoi(f[8]);
      r.wall_time_s = parse_double(f[9]);
      r.seed = std::stoull(f[10]);
      report.rows.push_back(r);
    } catch (const InvalidConfig&) {
      throw;
    } catch (const std::exception& e) {
      throw InvalidConfig("report line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return report;
}

namespace {

struct LogCurve {
  std::vector<double> log_sz;
  std::vector<double> log_mse;  // running max, nondecreasing
};

LogCurve prepare_curve(std::span<const CurvePoint> pts, double max_sigma_z, const char* which) {
  std::vector<CurvePoint> kept;
  for (const CurvePoint& p : pts)
    if (p.sigma_z > 0.0 && p.sigma_z <= max_sigma_z && std::isfinite(p.mse) && p.mse > 0.0)
      kept.push_back(p);
  if (kept.size() < 3)
    throw InvalidConfig(std::string(which) + " curve needs at least 3 sigma_z points in (0, " +
                        format_double(max_sigma_z) + "], got " + std::to_string(kept.size()));
  std::sort(kept.begin(), kept.end(),
            [](const CurvePoint& a, const CurvePoint& b) { return a.sigma_z < b.sigma_z; });
  LogCurve c;
  double running = -std::numeric_limits<double>::infinity();
  for (const CurvePoint& p : kept) {
    running = std::max(running, std::log(p.mse));
    c.log_sz.push_back(std::log(p.sigma_z));
    c.log_mse.push_back(running);
  }
  return c;
}

// Smallest log sigma_z at which the curve reaches `level` (level within range).
double first_crossing(const LogCurve& c, double level) {
  if (level <= c.log_mse.front()) return c.log_sz.front();
  for (std::size_t j = 0; j + 1 < c.log_mse.size(); ++j) {
    const double v0 = c.log_mse[j];
    const double v1 = c.log_mse[j + 1];
    if (level <= v1 && v1 > v0) {
      const double f = (level - v0) / (v1 - v0);
      return c.log_sz[j] + f * (c.log_sz[j + 1] - c.log_sz[j]);
    }
  }
  return c.log_sz.back();
}

}  // namespace

ImprovementResult improvement_factor(std::span<const CurvePoint> baseline,
                                     std::span<const CurvePoint> candidate, double max_sigma_z) {
  const LogCurve b = prepare_curve(baseline, max_sigma_z, "baseline");
  const LogCurve c = prepare_curve(candidate, max_sigma_z, "candidate");
  const double lo = std::max(b.log_mse.front(), c.log_mse.front());
  const double hi = std::min(b.log_mse.back(), c.log_mse.back());
  if (lo > hi) throw NoComparableRange("the MSE curves never attain a common level");

  // The log-ratio is piecewise linear in the level, so its maximum sits at a
  // vertex of either curve or at an end of the common range.
  std::vector<double> levels{lo, hi};
  for (const LogCurve* curve : {&b, &c})
    for (double v : curve->log_mse)
      if (v >= lo && v <= hi) levels.push_back(v);
  std::sort(levels.begin(), levels.end());

  ImprovementResult out;
  double best = -std::numeric_limits<double>::infinity();
  for (double level : levels) {
    const double ub = first_crossing(b, level);
    const double uc = first_crossing(c, level);
    if (uc - ub > best) {
      best = uc - ub;
      out.mse_level = std::exp(level);
      out.sigma_z_baseline = std::exp(ub);
      out.sigma_z_candidate = std::exp(uc);
    }
  }
  out.factor = std::exp(best);
  return out;
}

ImprovementResult improvement_factor(const ExperimentReport& report, EstimatorId baseline,
                                     EstimatorId candidate, int M, double sigma_w,
                                     double max_sigma_z) {
  auto curve = [&](EstimatorId id) {
    std::vector<CurvePoint> pts;
    for (const ReportRow& r : report.rows)
      if (r.estimator == id && r.M == M && r.sigma_w == sigma_w) pts.push_back({r.sigma_z, r.mse_mean});
    return pts;
  };
  const auto b = curve(baseline);
  const auto c = curve(candidate);
  ImprovementResult out = improvement_factor(b, c, max_sigma_z);
  out.baseline = std::string(to_string(baseline));
  out.candidate = std::string(to_string(candidate));
  out.M = M;
  out.sigma_w = sigma_w;
  return out;
}

double power_savings(double factor) {
  if (!(factor >= 1.0)) throw InvalidConfig("improvement factor must be >= 1");
  return 1.0 - 1.0 / (factor * factor);
}

}  // namespace jitter
