#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixreg/errors.hpp"
#include "mixreg/experiment.hpp"

using namespace mixreg;

namespace {

ExperimentConfig iid_config(std::size_t d, double noise, std::size_t n, std::size_t trials) {
  ExperimentConfig cfg(ProcessSpec::iid_gaussian(Matrix::Identity(d, d), Matrix::Ones(1, d), noise));
  cfg.ns = {n};
  cfg.trials = trials;
  cfg.seed = 77;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mixreg_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Stats, QuantileAndMedian) {
  EXPECT_EQ(empirical_quantile({5, 1, 4, 2, 3}, 0.9), 5);
  EXPECT_EQ(empirical_quantile({5, 1, 4, 2, 3}, 0.6), 3);
  EXPECT_EQ(median({3, 1, 2}), 2);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(median({}), ArgumentError);
}

TEST(Stats, SlopeOracles) {
  const std::vector<std::size_t> ns{100, 300, 1000, 3000, 10000};
  std::vector<double> inv, flat;
  for (auto n : ns) {
    inv.push_back(7.0 / static_cast<double>(n));
    flat.push_back(0.3);
  }
  EXPECT_NEAR(fit_log_slope(ns, inv), -1.0, 1e-6);
  EXPECT_NEAR(fit_log_slope(ns, flat), 0.0, 1e-12);
  EXPECT_THROW(fit_log_slope({1, 2, 3}, {1, 2, 3}), ArgumentError);
}

TEST(Trials, SerialAndParallelIdentical) {
  const auto cfg = iid_config(3, 1.0, 200, 64);
  const RegressionProblem prob = population_optimum(cfg.process);
  const auto a = run_trials(cfg.process, prob, 200, 64, 5, Execution::Serial);
  const auto b = run_trials(cfg.process, prob, 200, 64, 5, Execution::Parallel);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].seed, b[k].seed);
    EXPECT_EQ(a[k].excess_risk, b[k].excess_risk);
  }
}

TEST(Trials, DegenerateDesignCountsAsViolation) {
  const auto cfg = iid_config(3, 1.0, 2, 5);
  const auto r = run_trials(cfg.process, population_optimum(cfg.process), 2, 5, 1, Execution::Serial);
  for (const auto& t : r) {
    EXPECT_TRUE(t.degenerate);
    EXPECT_TRUE(std::isinf(t.excess_risk));
  }
}

TEST(Coverage, NoiselessIsExact) {
  auto cfg = iid_config(3, 0.0, 50, 100);
  cfg.partition.tau = 1;
  const auto reps = run_coverage(cfg);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_EQ(reps[0].coverage, 1.0);
  for (const auto& t : reps[0].results) EXPECT_LT(t.excess_risk, 1e-20);
}

TEST(Coverage, NeedsHundredTrials) {
  EXPECT_THROW(run_coverage(iid_config(2, 1.0, 100, 99)), ArgumentError);
}

TEST(Coverage, MonotoneInC1) {
  auto cfg = iid_config(2, 1.0, 100, 200);
  cfg.constants.c1 = 0.05;
  const double low = run_coverage(cfg)[0].coverage;
  cfg.constants.c1 = 0.5;
  const double high = run_coverage(cfg)[0].coverage;
  EXPECT_LE(low, high);
  EXPECT_LT(low, 1.0);
}

TEST(Coverage, OutputsAreReproducible) {
  const auto cfg = iid_config(2, 1.0, 100, 100);
  const auto a = scratch("cov_a"), b = scratch("cov_b");
  write_coverage_outputs(a.string(), run_coverage(cfg));
  write_coverage_outputs(b.string(), run_coverage(cfg));
  for (const char* f : {"coverage.csv", "coverage_detail.csv", "risks.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(slurp(a / "coverage.csv").substr(0, 26), "n,bound,quantile,coverage\n");
}

TEST(Coverage, SerialMatchesParallel) {
  const auto cfg = iid_config(2, 1.0, 100, 100);
  const auto a = run_coverage(cfg, Execution::Serial);
  const auto b = run_coverage(cfg, Execution::Parallel);
  EXPECT_NEAR(a[0].bound, b[0].bound, 1e-12 * a[0].bound);
  EXPECT_EQ(a[0].quantile, b[0].quantile);
  EXPECT_EQ(a[0].coverage, b[0].coverage);
}

TEST(LowerTail, IidFrequency) {
  auto cfg = iid_config(5, 1.0, 500, 300);
  const auto rows = verify_lower_tail(cfg);
  EXPECT_GE(rows[0].frequency, 0.9);
  EXPECT_NEAR(rows[0].h2, 3.0, 0.3);
}

TEST(LowerTail, SquareDesignFails) {
  auto cfg = iid_config(5, 1.0, 5, 200);
  cfg.partition.kind = PartitionRule::Kind::M;
  cfg.partition.m = 1;
  EXPECT_LT(verify_lower_tail(cfg)[0].frequency, 0.05);
}

TEST(NoiseWalk, ZeroNoise) {
  auto cfg = iid_config(2, 0.0, 100, 50);
  const auto rows = verify_noise_walk(cfg);
  EXPECT_EQ(rows[0].exceedance, 0.0);
  EXPECT_TRUE(rows[0].ratio.degenerate);
}

TEST(NoiseWalk, IidWithinBudget) {
  auto cfg = iid_config(3, 1.0, 400, 400);
  cfg.partition.tau = 4;
  cfg.delta = 0.1;
  const auto rows = verify_noise_walk(cfg);
  const double se = std::sqrt(0.1 * 0.9 / 400);
  EXPECT_LE(rows[0].exceedance, 0.1 + 3 * se);
  EXPECT_GT(rows[0].threshold, 0.0);
}

TEST(Clt, StableFrom) {
  EXPECT_EQ(stable_from({1, 2, 4}, {1.0, 1.1, 1.05}), std::optional<std::size_t>(1));
  EXPECT_EQ(stable_from({1, 2, 4, 8}, {1.0, 2.0, 2.1, 2.0}), std::optional<std::size_t>(2));
  EXPECT_EQ(stable_from({1, 2, 4}, {1.0, 2.0, 4.0}), std::nullopt);
}

TEST(Clt, IidStabilizesImmediately) {
  auto cfg = iid_config(1, 1.0, 100, 100);
  cfg.block_lengths = {1, 2, 4, 8, 16};
  cfg.n_mc = 4000;
  EXPECT_EQ(clt_consistency(cfg).stable_from, std::optional<std::size_t>(1));
}

TEST(Clt, BlockConstantNeedsFullBlocks) {
  const Matrix one = Matrix::Identity(1, 1);
  ExperimentConfig cfg(ProcessSpec::block_constant(16, one, one, 1.0));
  cfg.block_lengths = {1, 2, 4, 8, 16, 32, 64, 128};
  cfg.n_mc = 4000;
  const auto from = clt_consistency(cfg).stable_from;
  ASSERT_TRUE(from);
  EXPECT_GE(*from, 16u);
}

TEST(Bound, EvaluateAndCorollary) {
  auto cfg = iid_config(2, 1.0, 400, 100);
  cfg.partition.tau = 2;
  const BoundEvaluation eval = evaluate_bound(cfg, 400);
  EXPECT_EQ(eval.report.predicates.size(), 5u);
  const BoundReport cor = evaluate_corollary(cfg, eval);
  EXPECT_EQ(cor.kind, "corollary");
  EXPECT_NEAR(cor.sigma2, eval.report.sigma2, 1e-15);
}
