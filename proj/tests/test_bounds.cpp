#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "mixreg/bounds.hpp"
#include "mixreg/errors.hpp"

using namespace mixreg;

namespace {

NoiseSpectrum unit_spectrum(std::size_t n, std::size_t d) {
  NoiseSpectrum s;
  s.n = n;
  s.d_x = d;
  s.d_y = 1;
  s.sigma_odd = Matrix::Identity(d, d) * (n / 2.0);
  s.sigma_even = Matrix::Identity(d, d) * (n / 2.0);
  s.sigma_agg = Matrix::Identity(d, d);
  s.sigma2 = 1.0;
  s.edim = static_cast<double>(d);
  s.h2 = 3.0;
  s.h = std::sqrt(3.0);
  s.moment_s = 4.0;
  s.block_moment_s = d * (d + 2.0);
  return s;
}

}  // namespace

TEST(Bernstein, Arithmetic) {
  EXPECT_NEAR(bernstein_threshold(100, 1.0, 1.0, std::exp(-1.0)), 0.2 + 4.0 / 300.0, 1e-12);
  EXPECT_NEAR(bernstein_threshold(100, 1.0, 1.0, 1.0 - 1e-12), 0.0, 1e-5);
  EXPECT_EQ(blocked_bernstein_threshold(100, 1, 2.0, 3.0, 0.05), bernstein_threshold(100, 2.0, 3.0, 0.05));
  EXPECT_NEAR(blocked_bernstein_threshold(100, 5, 1.0, 1.0, std::exp(-1.0)), 0.2 + 20.0 / 300.0, 1e-12);
  EXPECT_THROW(blocked_bernstein_threshold(100, 7, 1.0, 1.0, 0.1), ArgumentError);
}

TEST(Bernstein, LeadingTermsAgree) {
  const double a = bernstein_threshold(1000, 2.0, 1.0, 0.1) - 4.0 * std::log(10.0) / 3000.0;
  const double b = blocked_bernstein_threshold(1000, 10, 2.0, 1.0, 0.1) - 40.0 * std::log(10.0) / 3000.0;
  EXPECT_NEAR(a, b, 1e-15);
}

TEST(Edim, Values) {
  EXPECT_NEAR(edim(Matrix::Identity(4, 4)), 4.0, 1e-12);
  Matrix d = Matrix::Identity(3, 3);
  d(0, 0) = 2;
  EXPECT_NEAR(edim(d), 2.0, 1e-12);
  Vector v(3);
  v << 1, 2, 3;
  EXPECT_NEAR(edim(v * v.transpose()), 1.0, 1e-12);
  EXPECT_THROW(edim(Matrix::Zero(2, 2)), ArgumentError);
}

TEST(FukNagaev, Constant) {
  const double expected = 1.0 + std::pow(8.0 / std::numbers::e, 8.0) * 42.0 * 42.0 + 1.0;
  EXPECT_NEAR(fuk_nagaev_constant(1, 1, 4) / expected, 1.0, 1e-12);
  EXPECT_NEAR(fuk_nagaev_constant(1, 1, 4), 9.93e6, 0.01e6);
  EXPECT_GT(fuk_nagaev_constant(1, 1, 5), fuk_nagaev_constant(1, 1, 4));
  // the eps^{-s} term vanishes as eps grows
  const double eps = 1e3;
  const double inner = 2 * (1 + 2 / eps) * 7;
  const double rest = fuk_nagaev_constant(eps, 1, 4) - 1 - std::pow(8.0 / std::numbers::e, 8.0) * inner * inner;
  EXPECT_LT(std::abs(rest), 1e-6);
}

TEST(FukNagaev, Tail) {
  const std::vector<double> none;
  const double delta = 0.05;
  EXPECT_NEAR(fuk_nagaev_tail(1.0, none, std::sqrt(3.0 * std::log(1.0 / delta)), 1, 1, 4), delta, 1e-14);
  EXPECT_NEAR(fuk_nagaev_tail(1.0, none, 1e6, 1, 1, 4), 0.0, 1e-300);
  const std::vector<double> m1{1.0, 2.0}, m2{2.0, 4.0};
  const double base = fuk_nagaev_tail(1.0, none, 5.0, 1, 1, 4);
  EXPECT_NEAR(fuk_nagaev_tail(1.0, m2, 5.0, 1, 1, 4) - base, 2 * (fuk_nagaev_tail(1.0, m1, 5.0, 1, 1, 4) - base),
              1e-9);
}

TEST(NoiseThreshold, SubGaussianShape) {
  const std::size_t n = 10000, d = 5;
  const double delta = 0.05, small = 1e-9;
  const double t = noise_term_threshold(1.0, 1.0, n / 2, n / 2, d, small, small, delta);
  const double expected = std::sqrt(2.0 / n) * (std::sqrt(double(d)) + std::sqrt(2 * std::log(1 / delta)));
  EXPECT_NEAR(t, expected, 1e-8);
}

TEST(NoiseThreshold, DeltaOneAndScaling) {
  const double t1 = noise_term_threshold(4.0, 2.0, 4, 4, 3.0, 0.5, 0.5, 1.0);
  EXPECT_NEAR(t1, (1 + 2 * 0.5) * std::sqrt(3.0) * std::sqrt(4.0 / 4), 1e-14);
  const double a = noise_term_threshold(1.0, 2.0, 5, 7, 2.0, 1, 1, 0.1);
  const double b = noise_term_threshold(4.0, 8.0, 5, 7, 2.0, 1, 1, 0.1);
  EXPECT_NEAR(b, 2 * a, 1e-12);
}

TEST(MainBound, Arithmetic) {
  const auto p = BlockPartition::uniform(1000, 500);
  NoiseSpectrum s = unit_spectrum(1000, 5);
  const BoundReport r = main_bound(s, p, MixingProfile::independent(), std::exp(-1.0));
  EXPECT_NEAR(r.bound_value, 0.012, 1e-15);
  EXPECT_EQ(r.predicates.size(), 5u);
  EXPECT_TRUE(r.predicate("burnin_2a").holds);
  EXPECT_TRUE(r.predicate("burnin_2b").holds);
  EXPECT_TRUE(r.predicate("burnin_3").holds);
}

TEST(MainBound, UniformPartitionPassesBalance) {
  for (std::size_t n : {100u, 101u, 333u}) {
    const auto p = BlockPartition::uniform(n, 7);
    NoiseSpectrum s = unit_spectrum(n, 2);
    s.sigma_odd *= 2.0 * p.odd_size() / n;
    s.sigma_even *= 2.0 * p.even_size() / n;
    const BoundReport r = main_bound(s, p, MixingProfile::independent(), 0.1);
    EXPECT_TRUE(r.predicate("burnin_2a").holds) << n;
  }
}

TEST(MainBound, TextAndCsv) {
  const auto p = BlockPartition::uniform(1000, 500);
  const BoundReport r = main_bound(unit_spectrum(1000, 5), p, MixingProfile::independent(), 0.1);
  std::ostringstream text, csv;
  r.write_text(text);
  for (const char* name : {"bound_value", "burnin_1a", "burnin_1b", "burnin_2a", "burnin_2b", "burnin_3"}) {
    EXPECT_NE(text.str().find(name), std::string::npos) << name;
  }
  r.write_csv_row(csv);
  const std::string row = csv.str();
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), static_cast<long>(BoundReport::csv_header().size() - 1));
  EXPECT_EQ(row.back(), '\n');
}

TEST(Corollary, Arithmetic) {
  CorollaryInput in;
  in.tau = 1;
  in.n = 10000;
  in.d_x = 4;
  in.sigma2 = 2.0;
  const BoundReport r = corollary_bound(in, MixingProfile::independent(), 0.1);
  EXPECT_NEAR(r.bound_value, 2 * 2 * (4 + std::log(10.0)) / 1e4, 1e-15);
  EXPECT_NEAR(r.bound_value, 0.002521, 1e-6);
}

TEST(Corollary, MarkovMixingPredicate) {
  CorollaryInput in;
  in.tau = 8;
  in.n = 1600;
  const MixingProfile m(MixingMethod::ExactMarkov, {{8, std::pow(0.4, 8) / 2}});
  const BoundReport r = corollary_bound(in, m, 0.1);
  EXPECT_NEAR(r.predicate("burnin_3").lhs, 200 * std::pow(0.4, 8) / 2, 1e-12);
  EXPECT_NEAR(r.predicate("burnin_3").lhs, 0.0655, 1e-4);
  EXPECT_THROW(
      [&] {
        CorollaryInput bad = in;
        bad.n = 1601;
        corollary_bound(bad, m, 0.1);
      }(),
      ArgumentError);
}

TEST(Corollary, UnitBlocksMatchMain) {
  const auto p = BlockPartition::uniform(1000, 500);
  const NoiseSpectrum s = unit_spectrum(1000, 5);
  CorollaryInput in;
  in.tau = 1;
  in.n = 1000;
  in.d_x = 5;
  in.sigma2 = 1.0;
  EXPECT_NEAR(corollary_bound(in, MixingProfile::independent(), 0.1).bound_value,
              main_bound(s, p, MixingProfile::independent(), 0.1).bound_value, 1e-15);
}

TEST(LowerTail, SampleSizeRequirement) {
  const auto p = BlockPartition::uniform(238, 119);
  const auto cert = lower_tail_certificate(p, 5, std::sqrt(3.0), 0.1, MixingProfile::independent(), 20);
  EXPECT_NEAR(cert.predicates[0].rhs, 20 * (5 + 3 * std::log(10.0)), 1e-10);
  EXPECT_NEAR(cert.predicates[0].rhs, 238.2, 0.1);
  EXPECT_TRUE(cert.predicates[1].holds);
  const auto p2 = BlockPartition::uniform(476, 119);
  const auto cert2 = lower_tail_certificate(p2, 5, std::sqrt(3.0), 0.1, MixingProfile::independent(), 20);
  EXPECT_NEAR(cert2.predicates[0].rhs, 2 * cert.predicates[0].rhs, 1e-10);
}

TEST(PhiTau, Values) {
  EXPECT_EQ(phi_tau(1, 2), 1);
  EXPECT_EQ(phi_tau(3, 2), 4);
  EXPECT_EQ(phi_tau(-3, 2), 4);
}

TEST(CsComparison, UnitBlocks) {
  const auto p = BlockPartition::uniform(100, 50);
  const NoiseSpectrum s = unit_spectrum(100, 1);
  const CsComparison c = cs_comparison(s, p, 1.0);
  EXPECT_EQ(c.sigma2, c.inflated);
  EXPECT_THROW(cs_comparison(unit_spectrum(100, 2), p, 1.0), UnsupportedSpec);
}

TEST(Constants, Validation) {
  UniversalConstants c;
  EXPECT_NO_THROW(c.validate());
  c.c3 = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
}
