#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mixreg/bounds.hpp"
#include "mixreg/config.hpp"
#include "mixreg/estimators.hpp"
#include "mixreg/parallel.hpp"

namespace mixreg {

struct TrialResult {
  std::uint64_t seed = 0;
  /// +inf when the design was degenerate.
  double excess_risk = 0.0;
  double min_eig = 0.0;
  double s_n_norm = 0.0;
  bool degenerate = false;
};

/// Seed of trial k at sample size n.
std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t k);

/// `trials` independent fits at sample size n; degenerate designs are kept
/// with an infinite excess risk.
std::vector<TrialResult> run_trials(const ProcessSpec& spec, const RegressionProblem& prob, std::size_t n,
                                    std::size_t trials, std::uint64_t seed, Execution exec);

struct CoverageReport {
  std::size_t n = 0;
  double bound = 0.0;
  double quantile = 0.0;  // empirical (1 - delta) quantile of the excess risk
  double coverage = 0.0;  // fraction of trials with excess risk <= bound
  double median = 0.0;
  std::size_t trials = 0;
  std::size_t degenerate = 0;
  BoundReport report;
  std::vector<TrialResult> results;
};

std::vector<CoverageReport> run_coverage(const ExperimentConfig& cfg, Execution exec = Execution::Parallel);

/// coverage.csv (n,bound,quantile,coverage), coverage_detail.csv (one
/// BoundReport row per n plus the risk summary) and risks.csv (per trial).
void write_coverage_outputs(const std::string& dir, const std::vector<CoverageReport>& reports);

/// Empirical q-quantile (inverse of the empirical CDF).
double empirical_quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

/// Least-squares slope of log(values) against log(ns); needs >= 4 points.
double fit_log_slope(const std::vector<std::size_t>& ns, const std::vector<double>& values);

struct SlopeReport {
  std::vector<std::size_t> ns;
  std::vector<double> medians;
  double slope = 0.0;
};

SlopeReport rate_slope(const ExperimentConfig& cfg, Execution exec = Execution::Parallel);

struct LowerTailRow {
  std::size_t n = 0;
  double frequency = 0.0;  // fraction of trials with lambda_min(Sigma~_n) >= 1/2
  double h2 = 0.0;
  LowerTailCertificate certificate;
};

std::vector<LowerTailRow> verify_lower_tail(const ExperimentConfig& cfg, Execution exec = Execution::Parallel);

struct NoiseWalkRow {
  std::size_t n = 0;
  RatioEstimate ratio;
  double threshold = 0.0;
  double budget = 0.0;
  double exceedance = 0.0;  // fraction of trials with ||S_n||_F >= threshold
  std::size_t trials = 0;
};

std::vector<NoiseWalkRow> verify_noise_walk(const ExperimentConfig& cfg, Execution exec = Execution::Parallel);

struct CltReport {
  std::vector<std::size_t> lengths;
  std::vector<double> sigma2;
  /// Smallest swept length from which every successive ratio lies in
  /// [0.8, 1.25]; empty when the sweep never stabilizes.
  std::optional<std::size_t> stable_from;
};

CltReport clt_consistency(const ExperimentConfig& cfg, Execution exec = Execution::Parallel);
std::optional<std::size_t> stable_from(const std::vector<std::size_t>& lengths, const std::vector<double>& sigma2);

/// Full bound evaluation at one n: spectrum, mixing profile and main bound.
struct BoundEvaluation {
  BlockPartition partition;
  NoiseSpectrum spectrum;
  BoundReport report;
};

BoundEvaluation evaluate_bound(const ExperimentConfig& cfg, std::size_t n, Execution exec = Execution::Parallel,
                               bool per_time_variance = false);

/// The one-dimensional stationary form, built from the same spectrum; needs
/// d_Y = 1 and 2 tau | n with tau = |a_max|.
BoundReport evaluate_corollary(const ExperimentConfig& cfg, const BoundEvaluation& eval);

}  // namespace mixreg
