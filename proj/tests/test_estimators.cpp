#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mixreg/errors.hpp"
#include "mixreg/estimators.hpp"
#include "oracles.hpp"

using namespace mixreg;

namespace {

ProcessSpec iid(std::size_t d, double noise = 1.0) {
  return ProcessSpec::iid_gaussian(Matrix::Identity(d, d), Matrix::Ones(1, d), noise);
}

ProcessSpec blocks_of(std::size_t k) {
  const Matrix one = Matrix::Identity(1, 1);
  return ProcessSpec::block_constant(k, one, one, 1.0);
}

SpectrumOptions serial_opts() {
  SpectrumOptions o;
  o.exec = Execution::Serial;
  return o;
}

}  // namespace

TEST(Spectrum, IidIsotropic) {
  const auto spec = iid(5);
  const RegressionProblem prob = population_optimum(spec);
  const auto p = BlockPartition::uniform(400, 200);
  const NoiseSpectrum s = noise_spectrum(spec, prob, p, 2000, 1);
  EXPECT_TRUE(s.exact_centering);
  EXPECT_NEAR(s.sigma2, 1.0, 0.05 * 1.0 + 0.03);
  EXPECT_NEAR(s.edim, 5.0, 0.25);
  EXPECT_LT((s.sigma_agg - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 0.05);
  EXPECT_NEAR(s.h2, 3.0, 0.15);
}

TEST(Spectrum, BlockConstantAligned) {
  const auto spec = blocks_of(16);
  const RegressionProblem prob = population_optimum(spec);
  const auto p = BlockPartition::uniform(512, 16);
  SpectrumOptions o;
  o.per_time_variance = true;
  // max_j over 512 Monte Carlo variances is biased up by a few standard errors
  const NoiseSpectrum s = noise_spectrum(spec, prob, p, 20000, 2, o);
  EXPECT_NEAR(s.sigma2, 16.0, 1.6);
  EXPECT_NEAR(s.max_sample_var, 1.0, 0.15);
  const CsComparison c = cs_comparison(s, p, s.max_sample_var);
  EXPECT_NEAR(c.sigma2 / c.inflated, 1.0, 0.15);
}

TEST(Spectrum, NeedsEnoughTrials) {
  const auto spec = iid(2);
  EXPECT_THROW(noise_spectrum(spec, population_optimum(spec), BlockPartition::uniform(10, 5), 999, 1),
               ArgumentError);
}

TEST(Spectrum, SerialAndParallelAgree) {
  const auto spec = ProcessSpec::gaussian_ar(Vector::Constant(2, 0.3), 1.0, 1);
  const RegressionProblem prob = population_optimum(spec);
  const auto p = BlockPartition::uniform(200, 10);
  const NoiseSpectrum a = noise_spectrum(spec, prob, p, 1000, 5, serial_opts());
  const NoiseSpectrum b = noise_spectrum(spec, prob, p, 1000, 5);
  EXPECT_NEAR(a.sigma2, b.sigma2, 1e-10 * a.sigma2);
  EXPECT_NEAR(a.block_moment_s, b.block_moment_s, 1e-10 * a.block_moment_s);
  EXPECT_NEAR(a.h2, b.h2, 1e-10 * a.h2);
}

TEST(Spectrum, CenteringModes) {
  Matrix p(2, 2);
  p << 0.8, 0.2, 0.2, 0.8;
  Matrix ex(2, 1), ey(2, 1);
  ex << 1, -1;
  ey << 2, 0;
  // Started in its stationary law, the chain has mean-zero V_j at every j.
  const auto chain = ProcessSpec::finite_markov(p, ex, ey);
  const NoiseSpectrum a = noise_spectrum(chain, population_optimum(chain), BlockPartition::uniform(100, 5), 1000, 3);
  EXPECT_TRUE(a.exact_centering);
  // From zero the AR laws drift, so the means are estimated.
  const auto cold = ProcessSpec::gaussian_ar(Vector::Constant(2, 0.3), 1.0, 1, 1, WarmStart::none());
  const NoiseSpectrum b = noise_spectrum(cold, population_optimum(cold, 100), BlockPartition::uniform(100, 5), 1000, 3);
  EXPECT_FALSE(b.exact_centering);
  EXPECT_GT(b.sigma2, 0.0);
}

TEST(CltVariance, IidIsFlat) {
  const auto spec = iid(1);
  const auto cov = clt_variance(spec, population_optimum(spec), {1, 4, 16, 64}, 4000, 9);
  for (const auto& [len, c] : cov) EXPECT_NEAR(c(0, 0), 1.0, 0.1) << len;
}

TEST(CltVariance, BlockConstantGrowsUntilK) {
  const auto spec = blocks_of(8);
  const auto cov = clt_variance(spec, population_optimum(spec), {1, 2, 4, 8, 16, 32}, 4000, 10);
  EXPECT_NEAR(cov.at(1)(0, 0), 1.0, 0.1);
  EXPECT_NEAR(cov.at(2)(0, 0), 2.0, 0.2);
  EXPECT_NEAR(cov.at(4)(0, 0), 4.0, 0.4);
  EXPECT_NEAR(cov.at(8)(0, 0), 8.0, 0.8);
  EXPECT_NEAR(cov.at(32)(0, 0), 8.0, 0.8);
}

TEST(Ratio, IidIsotropicMatchesGaussianNorm) {
  const std::size_t d = 5;
  const auto spec = iid(d);
  const RatioEstimate r = estimate_r(spec, population_optimum(spec), BlockPartition::uniform(400, 20), 2000, 4);
  const double expected = std::pow(oracle::gaussian_norm_mean(d), 2);
  EXPECT_NEAR(r.r, expected, 0.05 * expected);
  EXPECT_NEAR(r.r, double(d), 0.1 * d);
  EXPECT_NEAR(r.lambda_odd, 1.0, 0.1);
}

TEST(Ratio, ScalarBelowOne) {
  const auto spec = iid(1);
  const RatioEstimate r = estimate_r(spec, population_optimum(spec), BlockPartition::uniform(200, 10), 2000, 5);
  EXPECT_LE(r.r, 1.0 + 3 * r.r_se);
}

TEST(Ratio, ZeroProcessIsDegenerate) {
  const auto spec = iid(2, 0.0);
  const RatioEstimate r = estimate_r(spec, population_optimum(spec), BlockPartition::uniform(40, 4), 100, 6);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.r, 0.0);
}

TEST(Truncation, GaussianRatio) {
  const auto spec = iid(3);
  const RegressionProblem prob = population_optimum(spec);
  const auto p = BlockPartition::uniform(40, 2);
  Vector v = Vector::Ones(3);
  const double tau = std::sqrt(30.0 * 3.0);
  const TruncationCheck t = truncation_mass_check(spec, prob, p, 1, v, tau, 2000, 7);
  // h^2 is estimated; the ratio is 1 - h^2 / tau^2 with h^2 ~ 3.
  EXPECT_NEAR(t.lhs / t.second_moment, 1.0 - t.h2 / (tau * tau), 1e-12);
  EXPECT_NEAR(t.lhs / t.second_moment, 29.0 / 30.0, 0.01);
  EXPECT_TRUE(t.holds);
}

TEST(Truncation, HugeTauKeepsEverything) {
  const auto spec = iid(2);
  const TruncationCheck t =
      truncation_mass_check(spec, population_optimum(spec), BlockPartition::uniform(20, 2), 0, Vector::Ones(2), 1e9,
                            500, 8);
  EXPECT_NEAR(t.rhs, t.second_moment, 1e-12 * t.second_moment);
}

TEST(NoiseMean, ZeroCases) {
  EXPECT_TRUE(noise_mean_is_zero(iid(2), population_optimum(iid(2))));
  const auto cold = ProcessSpec::gaussian_ar(Vector::Constant(2, 0.3), 1.0, 1, 1, WarmStart::none());
  EXPECT_FALSE(noise_mean_is_zero(cold, population_optimum(cold, 100)));
}
