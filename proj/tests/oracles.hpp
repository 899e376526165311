#pragma once

// Test-side reference computations. These deliberately avoid the library's
// RNG and solvers: std::mt19937_64, std::normal_distribution, naive loops.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

class Welford {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  MeanSe result() const {
    return {mean_, std::sqrt(m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_))};
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline double ar1_variance(double a) { return 1.0 / (1.0 - a * a); }

inline double yule_walker_rho1(double a1, double a2) { return a1 / (1.0 - a2); }

// gamma(0) of a unit-noise AR(2).
inline double ar2_gamma0(double a1, double a2) {
  return (1.0 - a2) / ((1.0 + a2) * ((1.0 - a2) * (1.0 - a2) - a1 * a1));
}

// E||g|| for g ~ N(0, I_d).
inline double gaussian_norm_mean(double d) {
  return std::sqrt(2.0) * std::exp(std::lgamma((d + 1.0) / 2.0) - std::lgamma(d / 2.0));
}

// Stationary law by power iteration from uniform.
inline Vec stationary_by_power(const Mat& p, int sweeps = 20000) {
  Vec pi = Vec::Constant(p.rows(), 1.0 / static_cast<double>(p.rows()));
  for (int i = 0; i < sweeps; ++i) pi = (pi.transpose() * p).transpose();
  return pi / pi.sum();
}

// sum_x pi(x) TV(P^gap(x, .), pi) with P^gap built by enumerating every
// path x_0 .. x_gap.
inline double markov_beta_by_paths(const Mat& p, std::size_t gap) {
  const auto k = static_cast<std::size_t>(p.rows());
  const Vec pi = stationary_by_power(p);
  double beta = 0.0;
  for (std::size_t x0 = 0; x0 < k; ++x0) {
    Vec end = Vec::Zero(static_cast<Eigen::Index>(k));
    std::vector<std::size_t> path(gap, 0);
    while (true) {
      double prob = 1.0;
      std::size_t prev = x0;
      for (std::size_t step = 0; step < gap; ++step) {
        prob *= p(static_cast<Eigen::Index>(prev), static_cast<Eigen::Index>(path[step]));
        prev = path[step];
      }
      end[static_cast<Eigen::Index>(prev)] += prob;
      std::size_t pos = 0;
      while (pos < gap && ++path[pos] == k) path[pos++] = 0;
      if (pos == gap) break;
    }
    beta += pi[static_cast<Eigen::Index>(x0)] * 0.5 * (end - pi).cwiseAbs().sum();
  }
  return beta;
}

// Monte Carlo E[g^T A g g^T B g].
inline MeanSe quartic_mc(const Mat& a, const Mat& b, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Welford w;
  Vec g(a.rows());
  for (std::size_t i = 0; i < samples; ++i) {
    for (Eigen::Index j = 0; j < g.size(); ++j) g[j] = normal(gen);
    w.add(g.dot(a * g) * g.dot(b * g));
  }
  return w.result();
}

// Monte Carlo E[u_s^T S u_t w_s w_t] for y_t = sum theta_k y_{t-k} + eps_t
// started from zeros (eps_0 is the first innovation), a window of m lags
// and w_t = y_t - <alpha, u_t> with alpha the first m coefficients.
inline MeanSe cross_term_mc(const Vec& theta, std::size_t m, std::size_t s, std::size_t t, const Mat& sinv,
                            std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  const auto p = static_cast<std::size_t>(theta.size());
  Welford acc;
  std::vector<double> y(t + 1);
  auto lag = [&](std::size_t time, std::size_t k) { return time >= k ? y[time - k] : 0.0; };
  for (std::size_t r = 0; r < samples; ++r) {
    for (std::size_t time = 0; time <= t; ++time) {
      double v = normal(gen);
      for (std::size_t k = 1; k <= p; ++k) v += theta[static_cast<Eigen::Index>(k - 1)] * lag(time, k);
      y[time] = v;
    }
    auto window = [&](std::size_t time) {
      Vec u(static_cast<Eigen::Index>(m));
      for (std::size_t k = 1; k <= m; ++k) u[static_cast<Eigen::Index>(k - 1)] = lag(time, k);
      return u;
    };
    const Vec us = window(s), ut = window(t);
    const double ws = y[s] - theta.head(static_cast<Eigen::Index>(m)).dot(us);
    const double wt = y[t] - theta.head(static_cast<Eigen::Index>(m)).dot(ut);
    acc.add(us.dot(sinv * ut) * ws * wt);
  }
  return acc.result();
}

// Normal-equation OLS solved by LDLT.
inline Mat ols_normal_equations(const Mat& xs, const Mat& ys) {
  const Mat g = xs.transpose() * xs;
  return g.ldlt().solve(xs.transpose() * ys).transpose();
}

inline Mat random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal(gen);
  return m;
}

}  // namespace oracle
