#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string_view>

#include "mixreg/linalg.hpp"
#include "mixreg/process.hpp"

namespace mixreg {

class BlockPartition;

enum class MixingMethod { ExactMarkov, GaussianKLBound, UserSupplied, Analytic };

std::string_view to_string(MixingMethod method);

/// beta(i) for gaps i >= 1. Gaps beyond the largest stored one fall back to
/// `tail` when it is set (e.g. 0 for processes with finite memory) and are
/// missing otherwise.
class MixingProfile {
 public:
  MixingProfile(MixingMethod method, std::map<std::size_t, double> coefficients,
                std::optional<double> tail = std::nullopt);

  /// beta = 0 at every gap.
  static MixingProfile independent();

  MixingMethod method() const noexcept { return method_; }
  const std::map<std::size_t, double>& coefficients() const noexcept { return coeffs_; }
  std::optional<double> tail() const noexcept { return tail_; }

  bool covers(std::size_t gap) const noexcept;
  /// Throws MissingCoefficient for an uncovered gap, ArgumentError for 0.
  double at(std::size_t gap) const;

  /// Non-increasing over the stored gaps (reported, never enforced).
  bool is_monotone() const noexcept;

  /// Two columns gap,beta over the stored gaps.
  void write_csv(std::ostream& out) const;
  /// Reads gap,beta rows as a UserSupplied profile.
  static MixingProfile read_csv(std::istream& in);

 private:
  MixingMethod method_;
  std::map<std::size_t, double> coeffs_;
  std::optional<double> tail_;
};

/// E_{x ~ pi} || P^i(x, .) - pi ||_TV for the stationary law pi of P.
double beta_markov_exact(const Matrix& transition, std::size_t gap);
/// Same, with an explicitly given stationary law.
double beta_markov_exact(const Matrix& transition, const Vector& law, std::size_t gap);

/// KL( N(mu1, var1) || N(mu2, var2) ).
double kl_gaussian_1d(double mu1, double var1, double mu2, double var2);

/// Expected-KL bound e_1^T A^k Sigma_{t+1} (A^k)^T e_1 for y_{t+k} given x_t,
/// with unit-noise Gramians (the KL is invariant to the noise scale). Warm
/// started specs use the stationary Sigma_inf in place of Sigma_{t+1}.
double ar_expected_kl(const ProcessSpec& spec, std::size_t t, std::size_t k);

/// sqrt(ar_expected_kl / 2) clipped to [0, 1]: Pinsker, then Jensen.
double beta_ar_kl_bound(const ProcessSpec& spec, std::size_t t, std::size_t k);

/// Mixing profile over gaps 1..max_gap.
///  FiniteMarkov: exact. GaussianAR: KL bound, with the sup over t in
///  [horizon - i] (the bound grows with t, so t = horizon - i), and the gap
///  shortened by lag_offset + window - 1 so the whole regression window lies
///  past the conditioning time. IIDGaussian: zero. BlockConstant: 1 below the
///  block length, 0 from it on.
MixingProfile profile_for_spec(const ProcessSpec& spec, std::size_t max_gap, std::size_t horizon);

/// sum over the interior blocks i = 2 .. 2m-1 of beta(|a_i|).
double mixing_sum(const MixingProfile& profile, const BlockPartition& partition);

}  // namespace mixreg
