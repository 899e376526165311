#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mixreg/csv.hpp"
#include "mixreg/errors.hpp"
#include "mixreg/process.hpp"
#include "oracles.hpp"

using namespace mixreg;

namespace {

Vector vec_of(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double sample_var(const Matrix& col) {
  const double mean = col.mean();
  return (col.array() - mean).square().sum() / static_cast<double>(col.size() - 1);
}

double lag1_corr(const Matrix& col) {
  const Eigen::Index n = col.size();
  const double mean = col.mean();
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    den += (col(i) - mean) * (col(i) - mean);
    if (i + 1 < n) num += (col(i) - mean) * (col(i + 1) - mean);
  }
  return num / den;
}

ProcessSpec flip_chain(double q) {
  Matrix p(2, 2);
  p << 1 - q, q, q, 1 - q;
  Matrix ex(2, 1), ey(2, 1);
  ex << 1, -1;
  ey << 0, 0;
  return ProcessSpec::finite_markov(p, ex, ey);
}

}  // namespace

TEST(Process, ZeroCoefficientsGivePureNoise) {
  const auto spec = ProcessSpec::gaussian_ar(vec_of({0.0}), 1.0, 1, 1, WarmStart::none());
  const Trajectory a = simulate(spec, 3, 17);
  const Trajectory b = simulate(spec, 3, 17);
  EXPECT_EQ(a.ys, b.ys);
  ASSERT_EQ(a.size(), 3u);
  // x_t = y_{t-1} and y_{t-1} = eps_{t-1}
  EXPECT_EQ(a.xs(1, 0), a.ys(0, 0));
  EXPECT_EQ(a.xs(2, 0), a.ys(1, 0));
}

TEST(Process, Ar1StationaryVariance) {
  const auto spec = ProcessSpec::gaussian_ar(vec_of({0.5}), 1.0, 1);
  const Trajectory t = simulate(spec, 1000000, 2);
  EXPECT_NEAR(sample_var(t.ys), oracle::ar1_variance(0.5), 0.01);
}

TEST(Process, Ar2LagOneAutocorrelation) {
  const auto spec = ProcessSpec::gaussian_ar(vec_of({0.5, 0.2}), 1.0, 1);
  const Trajectory t = simulate(spec, 1000000, 4);
  EXPECT_NEAR(lag1_corr(t.ys), oracle::yule_walker_rho1(0.5, 0.2), 0.01);
}

TEST(Process, UnstableRejected) {
  EXPECT_THROW(ProcessSpec::gaussian_ar(vec_of({1.0}), 1.0, 1), UnstableProcess);
  EXPECT_THROW(ProcessSpec::gaussian_ar(vec_of({0.6, 0.5}), 1.0, 1), UnstableProcess);
}

TEST(Process, CompanionLayout) {
  const StateSpace ss = companion(vec_of({0.3}));
  Matrix expected(2, 2);
  expected << 0.3, 0, 1, 0;
  EXPECT_EQ(ss.A, expected);
  EXPECT_NEAR(matrix_power(companion(vec_of({0.5})).A, 2)(0, 0), 0.25, 1e-15);
  const StateSpace zero = companion(vec_of({0.0, 0.0, 0.0}));
  EXPECT_TRUE(matrix_power(zero.A, 4).isZero());
}

TEST(Process, Gramian) {
  const StateSpace ss = companion(vec_of({0.5}));
  EXPECT_NEAR(gramian(ss, 3)(0, 0), 1.3125, 1e-14);
  EXPECT_EQ(gramian(ss, 1), ss.B * ss.B.transpose());
  EXPECT_NEAR(gramian(companion(vec_of({0.9})), 2000)(0, 0), 1.0 / (1.0 - 0.81), 1e-9);
}

TEST(Process, ConditionalGaussianByHand) {
  const StateSpace ss = companion(vec_of({0.5}));
  const ConditionalLaw law = conditional_gaussian(ss, vec_of({1.0, 0.0}), 2);
  EXPECT_NEAR(law.mean, 0.25, 1e-15);
  EXPECT_NEAR(law.var, 1.25, 1e-15);
  const ConditionalLaw zero = conditional_gaussian(ss, vec_of({0.0, 0.0}), 5);
  EXPECT_EQ(zero.mean, 0.0);
}

TEST(Process, ConditionalGaussianMatchesSimulation) {
  // y_0 = 1, then two steps of y_t = 0.5 y_{t-1} + eps_t.
  std::mt19937_64 gen(8);
  std::normal_distribution<double> normal;
  oracle::Welford mean, var;
  for (int i = 0; i < 100000; ++i) {
    double y = 1.0;
    for (int k = 0; k < 2; ++k) y = 0.5 * y + normal(gen);
    mean.add(y);
    var.add((y - 0.25) * (y - 0.25));
  }
  const ConditionalLaw law = conditional_gaussian(companion(vec_of({0.5})), vec_of({1.0, 0.0}), 2);
  EXPECT_NEAR(mean.result().mean, law.mean, 3 * mean.result().se);
  EXPECT_NEAR(var.result().mean, law.var, 3 * var.result().se);
}

TEST(Process, StationaryCovariance) {
  const auto white = ProcessSpec::gaussian_ar(vec_of({0.0}), 2.0, 1);
  EXPECT_NEAR(stationary_covariance(white)(0, 0), 4.0, 1e-12);
  const auto ar1 = ProcessSpec::gaussian_ar(vec_of({0.5}), 1.0, 1);
  EXPECT_NEAR(stationary_covariance(ar1)(0, 0), 4.0 / 3.0, 1e-10);
  const auto ar2 = ProcessSpec::gaussian_ar(vec_of({0.5, 0.2}), 1.0, 2);
  const Matrix c = stationary_covariance(ar2);
  const double g0 = oracle::ar2_gamma0(0.5, 0.2);
  EXPECT_NEAR(c(0, 0), g0, 1e-10);
  EXPECT_NEAR(c(0, 1), 0.625 * g0, 1e-10);
}

TEST(Process, FrozenChainIsConstant) {
  Matrix p = Matrix::Identity(2, 2);
  Matrix ex(2, 1), ey(2, 1);
  ex << 1, 2;
  ey << 3, 4;
  Vector init(2);
  init << 0.5, 0.5;
  const auto spec = ProcessSpec::finite_markov(p, ex, ey, init);
  const Trajectory t = simulate(spec, 50, 1);
  for (Eigen::Index i = 1; i < 50; ++i) EXPECT_EQ(t.xs(i, 0), t.xs(0, 0));
}

TEST(Process, FlipChainStateFrequency) {
  const Trajectory t = simulate(flip_chain(0.3), 100000, 6);
  EXPECT_NEAR((t.xs.array() > 0).cast<double>().mean(), 0.5, 0.01);
}

TEST(Process, FairFlipChainIsUncorrelated) {
  const Trajectory t = simulate(flip_chain(0.5), 100000, 7);
  EXPECT_NEAR(lag1_corr(t.xs), 0.0, 0.01);
}

TEST(Process, PeriodicChainNeedsExplicitLaw) {
  Matrix p(2, 2);
  p << 0, 1, 1, 0;
  Matrix e(2, 1);
  e << 1, -1;
  EXPECT_THROW(ProcessSpec::finite_markov(p, e, e), ArgumentError);
  Matrix bad(2, 2);
  bad << 0.5, 0.6, 0.5, 0.5;
  EXPECT_THROW(check_row_stochastic(bad), ArgumentError);
}

TEST(Process, BlockConstantStructure) {
  const Matrix one = Matrix::Identity(1, 1);
  const auto k1 = ProcessSpec::block_constant(1, one, one, 1.0);
  EXPECT_NEAR(lag1_corr(simulate(k1, 100000, 1).xs), 0.0, 0.02);
  const auto k4 = ProcessSpec::block_constant(4, one, one, 1.0);
  EXPECT_NEAR(lag1_corr(simulate(k4, 100000, 2).xs), 0.75, 0.02);
  const auto kn = ProcessSpec::block_constant(20, one, one, 1.0);
  const Trajectory t = simulate(kn, 20, 3);
  EXPECT_TRUE((t.xs.array() == t.xs(0, 0)).all());
  EXPECT_TRUE((t.ys.array() == t.ys(0, 0)).all());
}

TEST(Process, TrajectoryCsv) {
  const Matrix one = Matrix::Identity(1, 1);
  const auto spec = ProcessSpec::iid_gaussian(one, one, 1.0);
  std::ostringstream out;
  write_trajectory_csv(out, simulate(spec, 4, 1));
  std::istringstream in(out.str());
  const CsvTable table = read_csv(in);
  ASSERT_EQ(table.header, (std::vector<std::string>{"t", "x_1", "y_1"}));
  EXPECT_EQ(table.rows.size(), 4u);
  EXPECT_EQ(table.rows.front().front(), "1");
}

TEST(Process, WindowMarginalOfZeroStartAr) {
  // Window [start, start+len) of a zero-initialized AR(1): Var(y_t) grows
  // as sum_{j<t} a^{2j}.
  const auto spec = ProcessSpec::gaussian_ar(vec_of({0.8}), 1.0, 1, 1, WarmStart::none());
  oracle::Welford v;
  for (std::uint64_t k = 0; k < 20000; ++k) {
    const Trajectory w = simulate_window(spec, 3, 1, k);
    v.add(w.ys(0, 0) * w.ys(0, 0));
  }
  // row 3 is y_4 = sum_{j=0..4} 0.8^{4-j} eps_j
  double expected = 0.0;
  for (int j = 0; j <= 4; ++j) expected += std::pow(0.64, j);
  EXPECT_NEAR(v.result().mean, expected, 4 * v.result().se);
}
