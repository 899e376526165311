#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mixreg/blocking.hpp"
#include "mixreg/linalg.hpp"
#include "mixreg/mixing.hpp"

namespace mixreg {

/// Placeholder values for the unspecified universal constants. Every report
/// carries the values it was evaluated with.
struct UniversalConstants {
  double c1 = 2.0;
  double c2 = 20.0;
  double c3 = 20.0;
  double c4 = 2.0;
  double c5 = 2.0;
  double c6 = 1.0;
  double c_lower = 20.0;

  /// Throws ArgumentError unless every constant is finite and positive.
  void validate() const;
};

/// Block second moments of the centered noise walk and the moment profile
/// used by the burn-in conditions. Matrices are (d_X d_Y) x (d_X d_Y).
struct NoiseSpectrum {
  /// Sigma_i per block; left empty when there are too many blocks to keep.
  std::vector<Matrix> sigma_blocks;
  /// Sums of Sigma_i over the odd (a_1, a_3, ...) and even blocks.
  Matrix sigma_odd;
  Matrix sigma_even;
  /// Sigma = (sigma_odd + sigma_even) / n
  Matrix sigma_agg;
  double sigma2 = 0.0;
  double edim = 0.0;

  double moment_s = 4.0;
  /// (1/m) sum_i E || sum_{j in a_i} Vbar_j / sqrt(|a_max|) ||_F^s
  double block_moment_s = 0.0;
  /// Estimated sup of E<v,X>^4 / <v, E[XX^T] v> over v on the Sigma_X
  /// ellipsoid boundary, and its square root.
  double h2 = 0.0;
  double h = 0.0;
  /// max_j E ||Vbar_j||_F^2; NaN unless per-time variances were tracked.
  double max_sample_var = 0.0;
  /// || mean S_n ||_F over the trials: the size of the Monte Carlo centering.
  double centering_offset = 0.0;
  bool exact_centering = false;

  std::size_t n = 0;
  std::size_t n_mc = 0;
  std::size_t d_x = 0;
  std::size_t d_y = 0;
};

double bernstein_threshold(std::size_t n, double var, double b, double delta);
/// Requires k | n. With k = 1 this is bernstein_threshold exactly.
double blocked_bernstein_threshold(std::size_t n, std::size_t k, double blockvar, double b, double delta);

/// trace / operator norm of a PSD matrix; ArgumentError for the zero matrix.
double edim(const Matrix& m);

/// 1 + (2s/e)^{2s} (2 (1 + 2/eps)(3 + 4/eta))^2 + eps^{-s}
double fuk_nagaev_constant(double eps, double eta, double s);

/// exp(-t^2 / ((2 + eta) Lambda)) + C_{eps,eta,s} sum_i m_i / t^s
double fuk_nagaev_tail(double lambda, std::span<const double> moments_s, double t, double eps,
                       double eta, double s);

/// max over sgn in {O, E} of sqrt(Lambda_sgn / |sgn|) ((1 + 2 eta) sqrt(r) +
/// (1 + 9 eps) sqrt((2 + eta) log(1/delta))). delta may be 1.
double noise_term_threshold(double lambda_odd, double lambda_even, std::size_t size_odd,
                            std::size_t size_even, double r, double eps, double eta, double delta);

/// Inputs of the failure-probability side of the dependent random-walk bound.
struct NoiseTermBudgetInput {
  double delta = 0.1;
  double mixing_sum = 0.0;
  double r = 1.0;
  double eps = 1.0;
  double eta = 1.0;
  double s = 4.0;
  double lambda_odd = 1.0;
  double lambda_even = 1.0;
  std::size_t size_odd = 1;
  std::size_t size_even = 1;
  /// sum over the blocks of each union of E || sum_{j in a_i} Z_j ||^s
  double block_moment_odd = 0.0;
  double block_moment_even = 0.0;
};

/// 2 delta + mixing_sum + C (1 + 9 eps)^s / (r^{s/2} eta^s) *
/// sum_sgn block_moment_sgn / (|sgn|^{s/2} Lambda_sgn^{s/2}).
double noise_term_failure_budget(const NoiseTermBudgetInput& in);

struct Predicate {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  std::string relation;  // "<=", ">=", "in", "psd"
};

struct BoundReport {
  std::string kind;  // "main" or "corollary"
  double bound_value = 0.0;
  std::vector<Predicate> predicates;
  double mixing_sum = 0.0;
  UniversalConstants constants;
  std::size_t n = 0;
  double delta = 0.0;
  double sigma2 = 0.0;
  double edim = 0.0;

  bool burnin_holds() const;
  const Predicate& predicate(std::string_view name) const;

  void write_text(std::ostream& out) const;
  static std::vector<std::string> csv_header();
  /// One row matching csv_header().
  void write_csv_row(std::ostream& out) const;
};

/// c1 sigma^2 (edim + log(1/delta)) / n with burn-ins 1a, 1b, 2a, 2b, 3.
BoundReport main_bound(const NoiseSpectrum& spectrum, const BlockPartition& partition,
                       const MixingProfile& profile, double delta,
                       const UniversalConstants& constants = {});

struct CorollaryInput {
  std::size_t tau = 1;
  std::size_t n = 2;
  std::size_t d_x = 1;
  double sigma2 = 1.0;
  double h = 1.0;
  double s = 4.0;
  /// E || sum_{i<=tau} Vbar_i / sqrt(tau d_X) ||^s
  double block_moment = 1.0;
};

/// c1 sigma^2 (d_X + log(1/delta)) / n for stationary data with 1-d targets
/// and blocks of length tau; 2 tau must divide n.
BoundReport corollary_bound(const CorollaryInput& in, const MixingProfile& profile, double delta,
                            const UniversalConstants& constants = {});

struct LowerTailCertificate {
  std::vector<Predicate> predicates;
  bool certified = false;
  /// Event guaranteed with probability 1 - delta when certified.
  std::string event;

  void write_text(std::ostream& out) const;
};

/// n >= C |a_max| (d_X + h^2 log(1/delta)) and the interior mixing sum is at
/// most delta / 2.
LowerTailCertificate lower_tail_certificate(const BlockPartition& partition, std::size_t d_x,
                                            double h, double delta, const MixingProfile& profile,
                                            double c_lower);

/// min(u^2, tau^2)
double phi_tau(double u, double tau);

struct CsComparison {
  double sigma2 = 0.0;
  double inflated = 0.0;
};

/// sigma^2 against |a_max| * per_sample_var; scalar problems only.
CsComparison cs_comparison(const NoiseSpectrum& spectrum, const BlockPartition& partition,
                           double per_sample_var);

}  // namespace mixreg
