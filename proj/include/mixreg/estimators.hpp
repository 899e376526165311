#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "mixreg/blocking.hpp"
#include "mixreg/bounds.hpp"
#include "mixreg/parallel.hpp"
#include "mixreg/process.hpp"
#include "mixreg/regression.hpp"

namespace mixreg {

/// True when every V_j has mean exactly zero, so no Monte Carlo centering is
/// needed: the per-time laws are all equal and M* is the analytic optimum.
bool noise_mean_is_zero(const ProcessSpec& spec, const RegressionProblem& prob);

struct SpectrumOptions {
  double moment_s = 4.0;
  /// Track E ||Vbar_j||^2 for every j (memory n * d_X * d_Y).
  bool per_time_variance = false;
  bool estimate_h = true;
  /// Random directions per covariate dimension in the h search.
  std::size_t h_directions_per_dim = 10;
  /// Budget of projected samples for the h search.
  double h_sample_budget = 2e8;
  /// Sigma_i is kept per block only up to this many blocks.
  std::size_t max_kept_blocks = 4096;
  Execution exec = Execution::Parallel;
};

/// Monte Carlo estimate of the block noise spectrum over n_mc independent
/// trajectories (trial k uses derive_seed(seed, k)). Needs n_mc >= 1000.
NoiseSpectrum noise_spectrum(const ProcessSpec& spec, const RegressionProblem& prob,
                             const BlockPartition& partition, std::size_t n_mc, std::uint64_t seed,
                             const SpectrumOptions& options = {});

/// Lower estimate of sup_v E<v,X>^4 / <v, E[XX^T] v> over v on the Sigma_X
/// ellipsoid boundary: eigenvectors of Sigma_X plus `random_dirs` random
/// directions, fourth moments pooled over time and over `trials`
/// trajectories of length n. Returns h^2.
double estimate_h2(const ProcessSpec& spec, const RegressionProblem& prob, std::size_t n,
                   std::size_t trials, std::size_t random_dirs, std::uint64_t seed,
                   Execution exec = Execution::Parallel);

/// n^{-1} Cov(vec sum_{j<=L} V_j) over a single block of each length L.
std::map<std::size_t, Matrix> clt_variance(const ProcessSpec& spec, const RegressionProblem& prob,
                                           const std::vector<std::size_t>& lengths, std::size_t n_mc,
                                           std::uint64_t seed, Execution exec = Execution::Parallel);

struct RatioEstimate {
  double r = 0.0;
  double r_se = 0.0;
  double lambda_odd = 0.0;
  double lambda_even = 0.0;
  /// E || sum_{i in sgn} Ztilde_i / sqrt(|sgn|) ||
  double mean_norm_odd = 0.0;
  double mean_norm_even = 0.0;
  /// sum over the blocks in sgn of E || sum_{j in a_i} Z_j ||^s
  double block_moment_odd = 0.0;
  double block_moment_even = 0.0;
  bool degenerate = false;
};

/// r, Lambda_O, Lambda_E and the block s-moments of the centered noise walk,
/// from n_mc blockwise decoupled resamples.
RatioEstimate estimate_r(const ProcessSpec& spec, const RegressionProblem& prob,
                         const BlockPartition& partition, std::size_t n_mc, std::uint64_t seed,
                         double s = 4.0, Execution exec = Execution::Parallel);

struct TruncationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  /// Standard error of rhs - lhs.
  double se = 0.0;
  double h2 = 0.0;
  double second_moment = 0.0;
  bool holds = false;
};

/// Both sides of (1 - h^2/tau^2) E sum_{i in a} <v,X_i>^2 <= sum_{i in a}
/// E <v,X_i>^2 1{F_a}, F_a = {mean_{i in a} <v,X_i>^2 <= tau^2}, for block
/// `block` of the partition, with v rescaled onto the Sigma_X ellipsoid
/// boundary and h^2 = max_{i in a} E<v,X_i>^4 / E<v,X_i>^2.
TruncationCheck truncation_mass_check(const ProcessSpec& spec, const RegressionProblem& prob,
                                      const BlockPartition& partition, std::size_t block, Vector v,
                                      double tau, std::size_t n_mc, std::uint64_t seed,
                                      Execution exec = Execution::Parallel);

}  // namespace mixreg
