#include "jitter/serialization.hpp"

#include <cmath>

#include "jitter/errors.hpp"

namespace jitter {

namespace {

template <class T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw InvalidConfig(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidConfig(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T optional_field(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidConfig(std::string("field '") + key + "': " + e.what());
  }
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidConfig("expected a numeric array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidConfig("expected a numeric array");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json to_json(const ModelConfig& config) {
  return {{"K", config.K()},
          {"M", config.M()},
          {"N", config.N()},
          {"sigma_z", config.sigma_z()},
          {"sigma_w", config.sigma_w()}};
}

ModelConfig model_config_from_json(const Json& j) {
  ModelConfig config(required<int>(j, "K"), required<int>(j, "M"), required<double>(j, "sigma_z"),
                     required<double>(j, "sigma_w"));
  if (j.contains("N") && j.at("N").get<int>() != config.N())
    throw InvalidConfig("config N does not equal M*K");
  return config;
}

Json to_json(const SampleSet& samples) {
  Json j{{"config", to_json(samples.config)}, {"seed", samples.seed}, {"y", to_json(samples.y)}};
  if (samples.z_true) j["z_true"] = to_json(*samples.z_true);
  if (samples.x_true) j["x_true"] = to_json(*samples.x_true);
  return j;
}

SampleSet sample_set_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("config") || !j.contains("y"))
    throw InvalidConfig("sample set needs 'config' and 'y'");
  SampleSet s{model_config_from_json(j.at("config")), optional_field<std::uint64_t>(j, "seed", 0),
              vector_from_json(j.at("y")), std::nullopt, std::nullopt};
  if (s.y.size() != s.config.N()) throw InvalidConfig("'y' length does not equal N");
  if (j.contains("z_true")) {
    s.z_true = vector_from_json(j.at("z_true"));
    if (s.z_true->size() != s.config.N()) throw InvalidConfig("'z_true' length does not equal N");
  }
  if (j.contains("x_true")) {
    s.x_true = vector_from_json(j.at("x_true"));
    if (s.x_true->size() != s.config.K()) throw InvalidConfig("'x_true' length does not equal K");
  }
  return s;
}

Json to_json(const EmTrace& trace) {
  Json est = Json::array();
  for (const auto& x : trace.estimates) est.push_back(to_json(x));
  Json ll = Json::array();
  for (double v : trace.loglik) ll.push_back(number_or_null(v));
  return {{"estimates", est},
          {"loglik", ll},
          {"iterations_run", trace.iterations_run},
          {"converged", trace.converged},
          {"guarded_samples", trace.guarded_samples},
          {"warnings", trace.warnings}};
}

Json to_json(const GibbsDiagnostics& d) {
  return {{"iterations", d.iterations},
          {"z_draws", d.z_draws},
          {"rejection_proposals", d.rejection_proposals},
          {"rejection_fallbacks", d.rejection_fallbacks},
          {"slice_proposals", d.slice_proposals},
          {"slice_draws", d.slice_draws},
          {"x_draws", d.x_draws},
          {"z_proposals", d.z_proposals},
          {"z_fallbacks", d.z_fallbacks}};
}

Json to_json(const GibbsResult& r) {
  Json j{{"x_hat", to_json(r.x_hat)}, {"z_hat", to_json(r.z_hat)}, {"diagnostics", to_json(r.diagnostics)}};
  if (r.chain_x) {
    Json chain = Json::array();
    for (const auto& x : *r.chain_x) chain.push_back(to_json(x));
    j["chain_x"] = chain;
  }
  return j;
}

Json to_json(const FisherEstimate& f) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < f.I_y.rows(); ++i) rows.push_back(to_json(Vector(f.I_y.row(i).transpose())));
  return {{"I_y", rows},
          {"Ns", f.Ns},
          {"quad_order", f.quad_order},
          {"seed", f.seed},
          {"underflows", f.underflows}};
}

Json to_json(const ImprovementResult& r) {
  return {{"baseline", r.baseline},
          {"candidate", r.candidate},
          {"M", r.M},
          {"sigma_w", r.sigma_w},
          {"factor", r.factor},
          {"mse_level", r.mse_level},
          {"sigma_z_baseline", r.sigma_z_baseline},
          {"sigma_z_candidate", r.sigma_z_candidate},
          {"power_savings", power_savings(std::max(1.0, r.factor))}};
}

SweepSpec sweep_spec_from_json(const Json& j) {
  SweepSpec s;
  s.K = required<int>(j, "K");
  s.M_list = required<std::vector<int>>(j, "M_list");
  s.sigma_z_list = required<std::vector<double>>(j, "sigma_z_list");
  s.sigma_w_list = required<std::vector<double>>(j, "sigma_w_list");
  s.trials = required<int>(j, "trials");
  for (const auto& name : required<std::vector<std::string>>(j, "estimators"))
    s.estimators.push_back(parse_estimator(name));
  s.master_seed = required<std::uint64_t>(j, "master_seed");
  s.allow_large_sigma_z = optional_field<bool>(j, "allow_large_sigma_z", false);
  s.threads = optional_field<unsigned>(j, "threads", 0);
  if (j.contains("options")) {
    const Json& o = j.at("options");
    EstimatorOptions& opt = s.options;
    opt.quad_order = optional_field(o, "quad_order", opt.quad_order);
    opt.em_max_iters = optional_field(o, "em_max_iters", opt.em_max_iters);
    opt.em_tol = optional_field(o, "em_tol", opt.em_tol);
    opt.em_restarts = optional_field(o, "em_restarts", opt.em_restarts);
    opt.burn_in = optional_field(o, "burn_in", opt.burn_in);
    opt.samples = optional_field(o, "samples", opt.samples);
    opt.rejection_max_tries = optional_field(o, "rejection_max_tries", opt.rejection_max_tries);
    opt.crb_ns = optional_field(o, "crb_ns", opt.crb_ns);
    opt.sigma_x2 = optional_field(o, "sigma_x2", opt.sigma_x2);
    opt.time_budget_s = optional_field(o, "time_budget_s", opt.time_budget_s);
  }
  s.validate();
  return s;
}

Json to_json(const SweepSpec& s) {
  std::vector<std::string> names;
  for (EstimatorId id : s.estimators) names.emplace_back(to_string(id));
  const EstimatorOptions& o = s.options;
  return {{"K", s.K},
          {"M_list", s.M_list},
          {"sigma_z_list", s.sigma_z_list},
          {"sigma_w_list", s.sigma_w_list},
          {"trials", s.trials},
          {"estimators", names},
          {"master_seed", s.master_seed},
          {"allow_large_sigma_z", s.allow_large_sigma_z},
          {"threads", s.threads},
          {"options",
           {{"quad_order", o.quad_order},
            {"em_max_iters", o.em_max_iters},
            {"em_tol", o.em_tol},
            {"em_restarts", o.em_restarts},
            {"burn_in", o.burn_in},
            {"samples", o.samples},
            {"rejection_max_tries", o.rejection_max_tries},
            {"crb_ns", o.crb_ns},
            {"sigma_x2", o.sigma_x2},
            {"time_budget_s", o.time_budget_s}}}};
}

Json provenance_json(const SweepSpec& spec, const ExperimentReport& report) {
  Json rows = Json::array();
  for (const ReportRow& r : report.rows)
    rows.push_back({{"estimator", to_string(r.estimator)},
                    {"K", r.K},
                    {"M", r.M},
                    {"sigma_z", r.sigma_z},
                    {"sigma_w", r.sigma_w},
                    {"trials", r.trials},
                    {"mse_mean", number_or_null(r.mse_mean)},
                    {"mse_stderr", number_or_null(r.mse_stderr)},
                    {"failures", r.failures},
                    {"wall_time_s", r.wall_time_s},
                    {"seed", r.seed}});
  Json digests = Json::array();
  for (const DatasetDigest& d : report.digests)
    digests.push_back({{"estimator", to_string(d.estimator)},
                       {"M", d.M},
                       {"sigma_z", d.sigma_z},
                       {"sigma_w", d.sigma_w},
                       {"dataset_hash", d.hash}});
  return {{"version", kArtifactVersion},
          {"mse_definition", "total squared error ||x_hat - x||^2 averaged over trials; divide by K for per-coefficient"},
          {"spec", to_json(spec)},
          {"rows", rows},
          {"dataset_digests", digests},
          {"failure_messages", report.failure_messages}};
}

}  // namespace jitter
