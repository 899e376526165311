#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mixreg/blocking.hpp"
#include "mixreg/errors.hpp"
#include "mixreg/mixing.hpp"
#include "oracles.hpp"

using namespace mixreg;

namespace {

Matrix flip(double q) {
  Matrix p(2, 2);
  p << 1 - q, q, q, 1 - q;
  return p;
}

ProcessSpec ar(std::initializer_list<double> theta, std::size_t window = 1, std::size_t lag = 1) {
  Vector v(static_cast<Eigen::Index>(theta.size()));
  Eigen::Index i = 0;
  for (double x : theta) v[i++] = x;
  return ProcessSpec::gaussian_ar(v, 1.0, window, lag);
}

}  // namespace

TEST(Mixing, UniformRowsAreIndependent) {
  const Matrix p = Matrix::Constant(3, 3, 1.0 / 3.0);
  for (std::size_t i = 1; i <= 5; ++i) EXPECT_NEAR(beta_markov_exact(p, i), 0.0, 1e-15);
}

TEST(Mixing, FlipChainClosedForm) {
  EXPECT_NEAR(beta_markov_exact(flip(0.3), 1), 0.2, 1e-12);
  EXPECT_NEAR(beta_markov_exact(flip(0.3), 3), 0.032, 1e-12);
  for (double q : {0.1, 0.3, 0.45}) {
    for (std::size_t i = 1; i <= 30; ++i) {
      EXPECT_NEAR(beta_markov_exact(flip(q), i), std::pow(std::abs(1 - 2 * q), double(i)) / 2, 1e-12);
    }
  }
}

TEST(Mixing, MatchesPathEnumeration) {
  Matrix p(3, 3);
  p << 0.5, 0.3, 0.2, 0.1, 0.6, 0.3, 0.25, 0.25, 0.5;
  for (std::size_t i = 1; i <= 6; ++i) {
    EXPECT_NEAR(beta_markov_exact(p, i), oracle::markov_beta_by_paths(p, i), 1e-12) << "gap " << i;
  }
}

TEST(Mixing, GaussianKl) {
  EXPECT_NEAR(kl_gaussian_1d(0, 1, 0, 1), 0.0, 1e-15);
  EXPECT_NEAR(kl_gaussian_1d(1, 1, 0, 1), 0.5, 1e-15);
  EXPECT_NEAR(kl_gaussian_1d(0, 1, 0, 2), 0.5 * std::log(2.0) - 0.25, 1e-15);
}

TEST(Mixing, ArKlBound) {
  const auto white = ar({0.0});
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_EQ(beta_ar_kl_bound(white, 1000, k), 0.0);
  const auto a = ar({0.5});
  EXPECT_NEAR(ar_expected_kl(a, 100000, 2), 0.0625 * 4.0 / 3.0, 1e-10);
  EXPECT_NEAR(beta_ar_kl_bound(a, 100000, 2), std::sqrt(0.0625 * 4.0 / 3.0 / 2.0), 1e-10);
  for (std::size_t k = 5; k < 10; ++k) {
    EXPECT_NEAR(beta_ar_kl_bound(a, 100000, k + 1) / beta_ar_kl_bound(a, 100000, k), 0.5, 1e-9);
  }
}

TEST(Mixing, ZeroStartKlIsBelowStationary) {
  const auto cold = ProcessSpec::gaussian_ar(Vector::Constant(1, 0.9), 1.0, 1, 1, WarmStart::none());
  const auto warm = ar({0.9});
  EXPECT_LT(ar_expected_kl(cold, 3, 1), ar_expected_kl(warm, 3, 1));
  EXPECT_NEAR(ar_expected_kl(cold, 20000, 4), ar_expected_kl(warm, 20000, 4), 1e-9);
}

TEST(Mixing, ProfileForSpec) {
  const Matrix one = Matrix::Identity(1, 1);
  const auto iid = profile_for_spec(ProcessSpec::iid_gaussian(one, one, 1.0), 10, 100);
  EXPECT_EQ(iid.at(7), 0.0);
  const auto blk = profile_for_spec(ProcessSpec::block_constant(4, one, one, 1.0), 10, 100);
  EXPECT_EQ(blk.at(3), 1.0);
  EXPECT_EQ(blk.at(4), 0.0);
  EXPECT_EQ(blk.at(1000), 0.0);
  const auto a = profile_for_spec(ar({0.5}), 20, 1000);
  EXPECT_EQ(a.method(), MixingMethod::GaussianKLBound);
  EXPECT_TRUE(a.is_monotone());
  EXPECT_THROW(a.at(21), MissingCoefficient);
  EXPECT_THROW(a.at(0), ArgumentError);
}

TEST(Mixing, ProfileCsvRoundTrip) {
  const MixingProfile p(MixingMethod::ExactMarkov, {{1, 0.2}, {2, 0.08}});
  std::ostringstream out;
  p.write_csv(out);
  EXPECT_EQ(out.str(), "gap,beta\n1,0.2\n2,0.08\n");
  std::istringstream in(out.str());
  const MixingProfile back = MixingProfile::read_csv(in);
  EXPECT_EQ(back.method(), MixingMethod::UserSupplied);
  EXPECT_EQ(back.at(2), 0.08);
}

TEST(Mixing, MixingSum) {
  EXPECT_EQ(mixing_sum(MixingProfile::independent(), BlockPartition::uniform(100, 5)), 0.0);
  const MixingProfile c(MixingMethod::UserSupplied, {{5, 0.01}});
  EXPECT_NEAR(mixing_sum(c, BlockPartition::uniform(50, 5)), 8 * 0.01, 1e-15);
  const MixingProfile m(MixingMethod::ExactMarkov, {{4, beta_markov_exact(flip(0.3), 4)}});
  EXPECT_NEAR(mixing_sum(m, BlockPartition::uniform(24, 3)), 4 * std::pow(0.4, 4) / 2, 1e-12);
}
