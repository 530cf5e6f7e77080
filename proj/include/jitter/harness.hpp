#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jitter/bayes_gibbs.hpp"
#include "jitter/em_ml.hpp"
#include "jitter/signal_model.hpp"

namespace jitter {

enum class EstimatorId {
  EfficientNoJitter,
  LinearUnbiased,
  LlsNoJitter,
  LlsRandomJitter,
  Em,
  GibbsRejection,
  GibbsSlice,
  Crb,
};

std::string_view to_string(EstimatorId id);
/// Parses the hyphenated identifiers ("efficient-no-jitter", "em", ...).
EstimatorId parse_estimator(std::string_view name);
const std::vector<EstimatorId>& all_estimators();

/// Knobs shared by every cell of a sweep.
struct EstimatorOptions {
  int quad_order = kDefaultQuadOrder;
  int em_max_iters = 500;
  double em_tol = 1e-8;
  int em_restarts = 0;
  int burn_in = 500;
  int samples = 2000;
  long rejection_max_tries = 10000;
  int crb_ns = 1000;
  double sigma_x2 = kPriorVariance;
  /// Per-trial, per-estimator budget in seconds (EM and Gibbs); 0 disables it.
  double time_budget_s = 0.0;
};

struct SweepSpec {
  int K = 10;
  std::vector<int> M_list;
  std::vector<double> sigma_z_list;
  std::vector<double> sigma_w_list;
  int trials = 100;
  std::vector<EstimatorId> estimators;
  std::uint64_t master_seed = 0;
  EstimatorOptions options;
  /// Lift the default sigma_z <= 0.5 cap.
  bool allow_large_sigma_z = false;
  /// Worker threads; 0 means hardware concurrency.
  unsigned threads = 0;

  void validate() const;
};

/// One (estimator, M, sigma_z, sigma_w) cell. mse is the total squared error
/// ||x_hat - x||^2 averaged over the successful trials (divide by K for the
/// per-coefficient figure). For the "crb" pseudo-estimator the averaged
/// quantity is trace(I_y(x)^{-1}) at each trial's x.
struct ReportRow {
  EstimatorId estimator;
  int K = 0;
  int M = 0;
  double sigma_z = 0.0;
  double sigma_w = 0.0;
  int trials = 0;
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
  int failures = 0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
};

/// Hash of every dataset an estimator consumed in one cell. Equal hashes
/// across estimators certify the paired-trial design.
struct DatasetDigest {
  EstimatorId estimator;
  int M = 0;
  double sigma_z = 0.0;
  double sigma_w = 0.0;
  std::uint64_t hash = 0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<DatasetDigest> digests;
  std::vector<std::string> failure_messages;
};

inline constexpr std::string_view kArtifactVersion = "jitter-estimation 0.1.0";
inline constexpr double kMaxSweepSigmaZ = 0.5;

/// Seed shared by all sigma_z cells of one (M, sigma_w) slice; trial t of
/// that slice draws from derive_seed(slice_seed, {t}). Sharing the stream
/// across sigma_z gives common random numbers along each MSE curve.
std::uint64_t slice_seed(std::uint64_t master_seed, int M, double sigma_w);

/// Runs every estimator on identical synthetic datasets for every cell.
/// Estimator failures are counted per cell and never abort the sweep.
ExperimentReport run_sweep(const SweepSpec& spec);

inline constexpr std::string_view kCsvHeader =
    "estimator,K,M,sigma_z,sigma_w,trials,mse_mean,mse_stderr,failures,wall_time_s,seed";

void write_csv(const ExperimentReport& report, std::ostream& out);
/// Reads rows written by write_csv. Throws InvalidConfig on malformed input.
ExperimentReport read_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Jitter-tolerance improvement

struct CurvePoint {
  double sigma_z;
  double mse;
};

struct ImprovementResult {
  std::string baseline;
  std::string candidate;
  int M = 0;
  double sigma_w = 0.0;
  /// Max over common MSE levels of sigma_z(candidate) / sigma_z(baseline).
  double factor = 1.0;
  double mse_level = 0.0;
  double sigma_z_baseline = 0.0;
  double sigma_z_candidate = 0.0;
};

/// Compares two MSE-vs-sigma_z curves in the log-log domain. Each curve is
/// made nondecreasing by a running maximum and interpolated piecewise
/// linearly; for every MSE level reached by both, the horizontal ratio
/// sigma_z(candidate) / sigma_z(baseline) is formed, and the largest is
/// returned. Only points with 0 < sigma_z <= max_sigma_z are used; each curve
/// needs at least 3 of them (InvalidConfig otherwise). Throws
/// NoComparableRange when the curves share no MSE level.
ImprovementResult improvement_factor(std::span<const CurvePoint> baseline,
                                     std::span<const CurvePoint> candidate,
                                     double max_sigma_z = kMaxSweepSigmaZ);

ImprovementResult improvement_factor(const ExperimentReport& report, EstimatorId baseline,
                                     EstimatorId candidate, int M, double sigma_w,
                                     double max_sigma_z = kMaxSweepSigmaZ);

/// Fractional ADC power reduction at equal accuracy for a jitter tolerance
/// gain `factor`: 1 - 1/factor^2.
double power_savings(double factor);

}  // namespace jitter
