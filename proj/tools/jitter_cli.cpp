// Command-line front end: simulate, estimate, crb, sweep, improvement.
//
// Exit codes: 0 ok, 2 invalid configuration or input, 3 numerical failure,
// 4 no comparable MSE range.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "jitter/bayes_gibbs.hpp"
#include "jitter/crb.hpp"
#include "jitter/em_ml.hpp"
#include "jitter/errors.hpp"
#include "jitter/harness.hpp"
#include "jitter/linear_estimators.hpp"
#include "jitter/quadrature.hpp"
#include "jitter/serialization.hpp"

using namespace jitter;

namespace {

enum Exit { kOk = 0, kInvalid = 2, kNumerical = 3, kNoRange = 4 };

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidConfig(path + ": " + e.what());
  }
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot write " + path);
  out << text << '\n';
}

struct ModelArgs {
  int K = 10;
  int M = 16;
  double sigma_z = 0.0;
  double sigma_w = 0.05;
  std::uint64_t seed = 0;
};

void add_model_options(CLI::App* cmd, ModelArgs& a) {
  cmd->add_option("--k", a.K, "number of coefficients")->required();
  cmd->add_option("--m", a.M, "oversampling factor")->required();
  cmd->add_option("--sigma-z", a.sigma_z, "jitter std. dev. (sample periods)")->required();
  cmd->add_option("--sigma-w", a.sigma_w, "additive noise std. dev.")->required();
  cmd->add_option("--seed", a.seed, "random seed");
}

// --x accepts "random" (prior draw), a JSON array, or a SampleSet with x_true.
ParameterVector load_x(const std::string& spec, int K, std::uint64_t seed) {
  if (spec == "random") return draw_prior_parameters(K, derive_seed(seed, {1}));
  const Json j = read_json(spec);
  ParameterVector x;
  if (j.is_array()) {
    x = vector_from_json(j);
  } else if (j.contains("x_true")) {
    x = vector_from_json(j.at("x_true"));
  } else {
    throw InvalidConfig(spec + ": expected an array or an object with 'x_true'");
  }
  if (x.size() != K) throw InvalidConfig("--x has length " + std::to_string(x.size()) + ", K is " + std::to_string(K));
  return x;
}

int cmd_simulate(const ModelArgs& a, const std::string& x_spec, const std::string& out) {
  const ModelConfig config(a.K, a.M, a.sigma_z, a.sigma_w);
  const ParameterVector x = load_x(x_spec, a.K, a.seed);
  SampleSet s = generate_samples(x, config, derive_seed(a.seed, {2}));
  s.seed = a.seed;
  emit(out, to_json(s).dump(2));
  return kOk;
}

struct EstimateArgs {
  std::string method;
  std::string in;
  std::string out;
  int quad_order = kDefaultQuadOrder;
  int burn_in = 500;
  int samples = 2000;
  double tol = 1e-8;
  int max_iters = 500;
  int restarts = 0;
  long rejection_max_tries = 10000;
  double sigma_x2 = kPriorVariance;
  std::uint64_t seed = 0;
  bool store_chain = false;
};

int cmd_estimate(const EstimateArgs& a) {
  const SampleSet s = sample_set_from_json(read_json(a.in));
  const EstimatorId id = parse_estimator(a.method);
  Json result{{"method", a.method}, {"config", to_json(s.config)}};
  ParameterVector x_hat;
  auto means = [&] { return mean_observation_matrices(s.config, gauss_hermite_rule(a.quad_order)); };
  switch (id) {
    case EstimatorId::EfficientNoJitter:
      x_hat = efficient_no_jitter(s);
      break;
    case EstimatorId::LinearUnbiased:
      x_hat = linear_unbiased(s, means());
      result["quad_order"] = a.quad_order;
      break;
    case EstimatorId::LlsNoJitter:
      x_hat = lls_no_jitter(s, a.sigma_x2);
      result["sigma_x2"] = a.sigma_x2;
      break;
    case EstimatorId::LlsRandomJitter:
      x_hat = lls_random_jitter(s, means(), a.sigma_x2);
      result["quad_order"] = a.quad_order;
      result["sigma_x2"] = a.sigma_x2;
      break;
    case EstimatorId::Em: {
      EmSettings es;
      es.quad_order = a.quad_order;
      es.max_iters = a.max_iters;
      es.tol = a.tol;
      es.restarts = a.restarts;
      es.restart_seed = a.seed;
      const EmResult r = em_run(s, es);
      x_hat = r.x;
      result["settings"] = {{"quad_order", a.quad_order}, {"max_iters", a.max_iters}, {"tol", a.tol},
                            {"restarts", a.restarts}, {"seed", a.seed}};
      result["trace"] = to_json(r.trace);
      break;
    }
    case EstimatorId::GibbsRejection:
    case EstimatorId::GibbsSlice: {
      GibbsSettings gs;
      gs.burn_in = a.burn_in;
      gs.samples = a.samples;
      gs.seed = a.seed;
      gs.rejection_max_tries = a.rejection_max_tries;
      gs.store_chain = a.store_chain;
      gs.z_sampler = id == EstimatorId::GibbsSlice ? ZSampler::Slice : ZSampler::Rejection;
      const GibbsResult r = gibbs_run(s, gs);
      x_hat = r.x_hat;
      result["settings"] = {{"burn_in", a.burn_in}, {"samples", a.samples}, {"seed", a.seed},
                            {"z_sampler", to_string(gs.z_sampler)},
                            {"rejection_max_tries", a.rejection_max_tries}};
      result["gibbs"] = to_json(r);
      break;
    }
    case EstimatorId::Crb:
      throw InvalidConfig("crb is not an estimator; use the crb subcommand");
  }
  result["x_hat"] = to_json(x_hat);
  if (s.x_true) result["squared_error"] = (x_hat - *s.x_true).squaredNorm();
  emit(a.out, result.dump(2));
  return kOk;
}

int cmd_crb(const ModelArgs& a, const std::string& x_spec, int ns, int quad_order, const std::string& out) {
  const ModelConfig config(a.K, a.M, a.sigma_z, a.sigma_w);
  const ParameterVector x = load_x(x_spec, a.K, a.seed);
  const FisherEstimate f = fisher_information(x, config, ns, gauss_hermite_rule(quad_order), a.seed);
  Json j{{"K", a.K},       {"M", a.M},           {"sigma_z", a.sigma_z},
         {"sigma_w", a.sigma_w}, {"Ns", ns},     {"quad_order", quad_order},
         {"seed", a.seed}, {"x", to_json(x)},    {"crb", crb_trace(f)},
         {"underflows", f.underflows}};
  emit(out, j.dump(2));
  return kOk;
}

int cmd_sweep(const std::string& spec_path, const std::string& out, const std::string& provenance,
              std::optional<unsigned> threads, bool omit_timing) {
  SweepSpec spec = sweep_spec_from_json(read_json(spec_path));
  if (threads) spec.threads = *threads;
  ExperimentReport report = run_sweep(spec);
  if (omit_timing)
    for (ReportRow& r : report.rows) r.wall_time_s = 0.0;
  std::ostringstream csv;
  write_csv(report, csv);
  std::string text = csv.str();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  emit(out, text);
  if (!provenance.empty()) emit(provenance, provenance_json(spec, report).dump(2));
  for (const std::string& m : report.failure_messages) std::cerr << "failure: " << m << '\n';
  return kOk;
}

int cmd_improvement(const std::string& report_path, const std::string& baseline,
                    const std::string& candidate, int M, double sigma_w, double max_sigma_z,
                    const std::string& out) {
  std::ifstream in(report_path);
  if (!in) throw InvalidConfig("cannot open " + report_path);
  const ExperimentReport report = read_csv(in);
  const ImprovementResult r = improvement_factor(report, parse_estimator(baseline),
                                                 parse_estimator(candidate), M, sigma_w, max_sigma_z);
  Json j = to_json(r);
  j["power_savings"] = power_savings(std::max(1.0, r.factor));
  emit(out, j.dump(2));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coefficient estimation for jittered samples of a periodic bandlimited signal"};
  app.require_subcommand(1);

  ModelArgs sim;
  std::string sim_x = "random", sim_out;
  auto* simulate = app.add_subcommand("simulate", "draw a synthetic sample set");
  add_model_options(simulate, sim);
  simulate->add_option("--x", sim_x, "coefficients: 'random' or a JSON file");
  simulate->add_option("--out", sim_out, "output SampleSet JSON (default stdout)");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "estimate coefficients from a sample set");
  estimate->add_option("--method", est.method, "estimator identifier")->required();
  estimate->add_option("--in", est.in, "SampleSet JSON")->required();
  estimate->add_option("--out", est.out, "output JSON (default stdout)");
  estimate->add_option("--quad-order", est.quad_order, "Gauss-Hermite order");
  estimate->add_option("--burn-in", est.burn_in, "Gibbs burn-in iterations");
  estimate->add_option("--samples", est.samples, "Gibbs retained iterations");
  estimate->add_option("--tol", est.tol, "EM relative step tolerance");
  estimate->add_option("--max-iters", est.max_iters, "EM iteration cap");
  estimate->add_option("--restarts", est.restarts, "EM restarts from prior draws");
  estimate->add_option("--max-tries", est.rejection_max_tries, "rejection proposals before slice fallback");
  estimate->add_option("--sigma-x2", est.sigma_x2, "prior variance for the LLS estimators");
  estimate->add_option("--seed", est.seed, "sampler / restart seed");
  estimate->add_flag("--store-chain", est.store_chain, "include the x chain in the output");

  ModelArgs crb_args;
  std::string crb_x = "random", crb_out;
  int ns = 1000, crb_order = kDefaultQuadOrder;
  auto* crb = app.add_subcommand("crb", "Monte Carlo Cramer-Rao bound");
  add_model_options(crb, crb_args);
  crb->add_option("--x", crb_x, "coefficients: 'random' or a JSON file");
  crb->add_option("--ns", ns, "Monte Carlo draws per sample");
  crb->add_option("--quad-order", crb_order, "Gauss-Hermite order");
  crb->add_option("--out", crb_out, "output JSON (default stdout)");

  std::string spec_path, sweep_out, provenance;
  std::optional<unsigned> threads;
  bool omit_timing = false;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo MSE sweep");
  sweep->add_option("--spec", spec_path, "sweep spec JSON")->required();
  sweep->add_option("--out", sweep_out, "report CSV (default stdout)");
  sweep->add_option("--provenance", provenance, "provenance JSON");
  sweep->add_option("--threads", threads, "worker threads (default: all cores)");
  sweep->add_flag("--omit-timing", omit_timing, "write wall_time_s as 0 for byte-comparable output");

  std::string report_path, baseline, candidate, imp_out;
  int imp_m = 0;
  double imp_sw = 0.0, max_sz = kMaxSweepSigmaZ;
  auto* improvement = app.add_subcommand("improvement", "jitter tolerance improvement factor");
  improvement->add_option("--report", report_path, "report CSV")->required();
  improvement->add_option("--baseline", baseline, "baseline estimator")->required();
  improvement->add_option("--candidate", candidate, "candidate estimator")->required();
  improvement->add_option("--m", imp_m, "oversampling factor of the slice")->required();
  improvement->add_option("--sigma-w", imp_sw, "noise level of the slice")->required();
  improvement->add_option("--max-sigma-z", max_sz, "largest sigma_z considered");
  improvement->add_option("--out", imp_out, "output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*simulate) return cmd_simulate(sim, sim_x, sim_out);
    if (*estimate) return cmd_estimate(est);
    if (*crb) return cmd_crb(crb_args, crb_x, ns, crb_order, crb_out);
    if (*sweep) return cmd_sweep(spec_path, sweep_out, provenance, threads, omit_timing);
    if (*improvement) return cmd_improvement(report_path, baseline, candidate, imp_m, imp_sw, max_sz, imp_out);
  } catch (const InvalidConfig& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalid;
  } catch (const NoComparableRange& e) {
    std::cerr << "no comparable range: " << e.what() << '\n';
    return kNoRange;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const BudgetExceeded& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kInvalid;
}
