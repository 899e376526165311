#include "mixreg/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "mixreg/blocking.hpp"
#include "mixreg/csv.hpp"
#include "mixreg/errors.hpp"

namespace mixreg {

namespace {

// Sigma_k by binary splitting: Sigma_{a+b} = Sigma_a + A^a Sigma_b (A^a)^T.
Matrix gramian_doubling(const StateSpace& ss, std::size_t k) {
  const auto d = ss.A.rows();
  Matrix result = Matrix::Zero(d, d);
  Matrix shift = Matrix::Identity(d, d);  // A^len
  Matrix chunk = ss.B * ss.B.transpose();  // Sigma_{2^j}
  Matrix chunk_power = ss.A;               // A^{2^j}
  while (k > 0) {
    if (k & 1U) {
      result += shift * chunk * shift.transpose();
      shift = shift * chunk_power;
    }
    k >>= 1U;
    if (k == 0) break;
    chunk += chunk_power * chunk * chunk_power.transpose();
    chunk_power = chunk_power * chunk_power;
  }
  return result;
}

}  // namespace

std::string_view to_string(MixingMethod method) {
  switch (method) {
    case MixingMethod::ExactMarkov: return "exact_markov";
    case MixingMethod::GaussianKLBound: return "gaussian_kl_bound";
    case MixingMethod::UserSupplied: return "user_supplied";
    case MixingMethod::Analytic: return "analytic";
  }
  return "unknown";
}

MixingProfile::MixingProfile(MixingMethod method, std::map<std::size_t, double> coefficients,
                             std::optional<double> tail)
    : method_(method), coeffs_(std::move(coefficients)), tail_(tail) {
  for (const auto& [gap, beta] : coeffs_) {
    if (gap == 0) throw ArgumentError("mixing gaps start at 1");
    if (!(beta >= 0.0 && beta <= 1.0)) {
      throw ArgumentError("beta(" + std::to_string(gap) + ") = " + format_double(beta) +
                          " is outside [0, 1]");
    }
  }
  if (tail_ && !(*tail_ >= 0.0 && *tail_ <= 1.0)) throw ArgumentError("tail beta outside [0, 1]");
}

MixingProfile MixingProfile::independent() { return MixingProfile(MixingMethod::Analytic, {}, 0.0); }

bool MixingProfile::covers(std::size_t gap) const noexcept {
  if (gap == 0) return false;
  if (coeffs_.count(gap)) return true;
  return tail_.has_value() && (coeffs_.empty() || gap > coeffs_.rbegin()->first);
}

double MixingProfile::at(std::size_t gap) const {
  if (gap == 0) throw ArgumentError("mixing gaps start at 1");
  if (auto it = coeffs_.find(gap); it != coeffs_.end()) return it->second;
  if (tail_ && (coeffs_.empty() || gap > coeffs_.rbegin()->first)) return *tail_;
  throw MissingCoefficient(gap);
}

bool MixingProfile::is_monotone() const noexcept {
  double prev = 1.0;
  for (const auto& [gap, beta] : coeffs_) {
    if (beta > prev) return false;
    prev = beta;
  }
  return !tail_ || *tail_ <= prev;
}

void MixingProfile::write_csv(std::ostream& out) const {
  CsvWriter csv(out);
  csv.header({"gap", "beta"});
  for (const auto& [gap, beta] : coeffs_) csv.row(gap, beta);
}

MixingProfile MixingProfile::read_csv(std::istream& in) {
  const CsvTable table = mixreg::read_csv(in);
  const auto gap_col = table.column("gap");
  const auto beta_col = table.column("beta");
  std::map<std::size_t, double> coeffs;
  for (const auto& row : table.rows) {
    const double gap = parse_double(row[gap_col]);
    if (gap < 1.0 || gap != std::floor(gap)) throw ArgumentError("gap must be a positive integer");
    coeffs[static_cast<std::size_t>(gap)] = parse_double(row[beta_col]);
  }
  return MixingProfile(MixingMethod::UserSupplied, std::move(coeffs));
}

double beta_markov_exact(const Matrix& transition, std::size_t gap) {
  check_row_stochastic(transition);
  auto law = unique_stationary_law(transition);
  if (!law) throw ArgumentError("transition matrix has no unique stationary law");
  return beta_markov_exact(transition, *law, gap);
}

double beta_markov_exact(const Matrix& transition, const Vector& law, std::size_t gap) {
  check_row_stochastic(transition);
  if (gap == 0) throw ArgumentError("mixing gaps start at 1");
  if (law.size() != transition.rows()) throw ArgumentError("stationary law has the wrong size");
  const Matrix pi = matrix_power(transition, gap);
  double beta = 0.0;
  for (Eigen::Index x = 0; x < pi.rows(); ++x) {
    beta += law[x] * 0.5 * (pi.row(x).transpose() - law).cwiseAbs().sum();
  }
  return std::clamp(beta, 0.0, 1.0);
}

double kl_gaussian_1d(double mu1, double var1, double mu2, double var2) {
  if (!(var1 > 0.0) || !(var2 > 0.0)) throw ArgumentError("Gaussian variances must be positive");
  const double d = mu1 - mu2;
  return 0.5 * std::log(var2 / var1) + 0.5 * (var1 / var2 - 1.0) + d * d / (2.0 * var2);
}

double ar_expected_kl(const ProcessSpec& spec, std::size_t t, std::size_t k) {
  if (spec.kind() != ProcessKind::GaussianAR) throw UnsupportedSpec("KL bound needs a GaussianAR spec");
  if (k == 0) throw ArgumentError("KL bound needs k >= 1");
  const StateSpace ss = companion(spec.ar_coeffs());
  const Matrix past = spec.discard() > 0
                          ? lyapunov_fixed_point(ss.A, ss.B * ss.B.transpose())
                          : gramian_doubling(ss, t + 1);
  const Matrix ak = matrix_power(ss.A, k);
  return (ss.C * ak * past * ak.transpose() * ss.C.transpose())(0);
}

double beta_ar_kl_bound(const ProcessSpec& spec, std::size_t t, std::size_t k) {
  return std::clamp(std::sqrt(std::max(0.0, ar_expected_kl(spec, t, k)) / 2.0), 0.0, 1.0);
}

MixingProfile profile_for_spec(const ProcessSpec& spec, std::size_t max_gap, std::size_t horizon) {
  std::map<std::size_t, double> coeffs;
  switch (spec.kind()) {
    case ProcessKind::IIDGaussian: return MixingProfile::independent();
    case ProcessKind::BlockConstant: {
      for (std::size_t i = 1; i < spec.block_len(); ++i) coeffs[i] = 1.0;
      return MixingProfile(MixingMethod::Analytic, std::move(coeffs), 0.0);
    }
    case ProcessKind::FiniteMarkov: {
      // Powers are accumulated incrementally; gap i costs one multiply.
      const Matrix& p = spec.transition();
      const Vector& law = spec.initial_law();
      Matrix pi = p;
      for (std::size_t i = 1; i <= max_gap; ++i) {
        if (i > 1) pi = pi * p;
        double beta = 0.0;
        for (Eigen::Index x = 0; x < pi.rows(); ++x) {
          beta += law[x] * 0.5 * (pi.row(x).transpose() - law).cwiseAbs().sum();
        }
        coeffs[i] = std::clamp(beta, 0.0, 1.0);
      }
      return MixingProfile(MixingMethod::ExactMarkov, std::move(coeffs));
    }
    case ProcessKind::GaussianAR: {
      const std::size_t reach = spec.lag_offset() + spec.window() - 1;
      for (std::size_t i = 1; i <= max_gap; ++i) {
        if (i <= reach) {
          coeffs[i] = 1.0;
          continue;
        }
        const std::size_t t = horizon > i ? horizon - i : 0;
        coeffs[i] = beta_ar_kl_bound(spec, t, i - reach);
      }
      return MixingProfile(MixingMethod::GaussianKLBound, std::move(coeffs));
    }
  }
  throw UnsupportedSpec("unknown process kind");
}

double mixing_sum(const MixingProfile& profile, const BlockPartition& partition) {
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < partition.block_count(); ++i) sum += profile.at(partition.length(i));
  return sum;
}

}  // namespace mixreg
