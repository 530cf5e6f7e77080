#pragma once

#include <json.hpp>

#include "jitter/bayes_gibbs.hpp"
#include "jitter/crb.hpp"
#include "jitter/em_ml.hpp"
#include "jitter/harness.hpp"
#include "jitter/signal_model.hpp"

namespace jitter {

using Json = nlohmann::json;

Json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const Json& j);

/// {"config": {...}, "seed": s, "y": [...], "z_true": [...]?, "x_true": [...]?}.
/// Doubles are written in shortest round-trip form, so parsing the output
/// reproduces every value bit for bit.
Json to_json(const SampleSet& samples);
SampleSet sample_set_from_json(const Json& j);

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json to_json(const EmTrace& trace);
Json to_json(const GibbsDiagnostics& diag);
Json to_json(const GibbsResult& result);
Json to_json(const FisherEstimate& fisher);
Json to_json(const ImprovementResult& result);

/// Reads a sweep description. Keys: K, M_list, sigma_z_list, sigma_w_list,
/// trials, estimators, master_seed, and optional options/allow_large_sigma_z/threads.
SweepSpec sweep_spec_from_json(const Json& j);
Json to_json(const SweepSpec& spec);

/// Sweep spec, artifact version, rows and per-cell dataset digests.
Json provenance_json(const SweepSpec& spec, const ExperimentReport& report);

}  // namespace jitter
