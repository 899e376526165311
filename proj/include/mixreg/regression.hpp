#pragma once

#include <cstdint>
#include <optional>

#include "mixreg/linalg.hpp"
#include "mixreg/process.hpp"

namespace mixreg {

enum class MomentSource { Analytic, MonteCarlo };

/// Population quantities of a regression task: the averaged covariate
/// covariance Sigma_X (d_X x d_X, positive definite) and the best linear
/// predictor M* (d_Y x d_X).
class RegressionProblem {
 public:
  RegressionProblem(Matrix sigma_x, Matrix m_star, MomentSource source = MomentSource::Analytic,
                    std::optional<Matrix> m_star_std_error = std::nullopt);

  const Matrix& sigma_x() const noexcept { return sigma_x_; }
  const Matrix& m_star() const noexcept { return m_star_; }
  MomentSource source() const noexcept { return source_; }
  /// Entrywise standard error of M*, MonteCarlo source only.
  const std::optional<Matrix>& m_star_std_error() const noexcept { return m_star_se_; }

  const Matrix& sigma_x_sqrt() const noexcept { return sqrt_; }
  const Matrix& sigma_x_inv_sqrt() const noexcept { return inv_sqrt_; }

  std::size_t covariate_dim() const noexcept { return static_cast<std::size_t>(sigma_x_.rows()); }
  std::size_t target_dim() const noexcept { return static_cast<std::size_t>(m_star_.rows()); }

 private:
  Matrix sigma_x_;
  Matrix m_star_;
  MomentSource source_;
  std::optional<Matrix> m_star_se_;
  Matrix sqrt_;
  Matrix inv_sqrt_;
};

struct FitResult {
  Matrix m_hat;
  /// Sigma_X^{-1/2} (1/n sum X_i X_i^T) Sigma_X^{-1/2}
  Matrix emp_cov_whitened;
  Matrix s_n;
  double excess_risk = 0.0;
  double min_eig = 0.0;
};

/// M_hat = (sum Y_i X_i^T)(sum X_i X_i^T)^{-1}, solved by QR of the Gram
/// matrix. Throws DegenerateDesign when its smallest eigenvalue is at most
/// 1e-10 * trace / d_X.
Matrix fit_ols(const Matrix& xs, const Matrix& ys);
inline Matrix fit_ols(const Trajectory& traj) { return fit_ols(traj.xs, traj.ys); }

/// OLS plus the whitened covariance, noise walk and excess risk.
FitResult fit(const Trajectory& traj, const RegressionProblem& prob);

/// ||(m - M*) Sigma_X^{1/2}||_F^2
double excess_risk(const Matrix& m, const RegressionProblem& prob);

/// Analytic Sigma_X and M*.
///  GaussianAR, warm started: Yule-Walker from the stationary state
///  covariance. GaussianAR, zero initial condition: second moments averaged
///  exactly over the `horizon` returned samples via the state recursion
///  (horizon is required). IIDGaussian / BlockConstant: (cov, link).
///  FiniteMarkov: stationary mixture of the emissions.
RegressionProblem population_optimum(const ProcessSpec& spec,
                                     std::optional<std::size_t> horizon = std::nullopt);

/// Sigma_X and M* from one long simulation of length n; standard errors of
/// M* by batch means over `batches` consecutive stretches.
RegressionProblem population_optimum_mc(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                                        std::size_t batches = 50);

/// Noise interaction variables: row i of v is vec(V_i)^T with
/// V_i = W_i X_i^T Sigma_X^{-1/2}, W_i = Y_i - M* X_i (column-stacked, so
/// entry c * d_Y + r is W_i[r] * (Sigma_X^{-1/2} X_i)[c]). s_n = mean V_i.
struct NoiseWalk {
  Matrix v;
  Matrix s_n;
};

NoiseWalk noise_walk(const Trajectory& traj, const RegressionProblem& prob);

struct IdentityResidual {
  double absolute = 0.0;
  double relative = 0.0;
};

/// || (M_hat - M*) Sigma_X^{1/2} - S_n Sigma~_n^{-1} ||_F, absolute and
/// relative to the larger of the two sides.
IdentityResidual error_identity_check(const Trajectory& traj, const RegressionProblem& prob);

/// E[g^T A g * g^T B g] for standard Gaussian g: 2 <sym A, sym B> + tr A tr B.
/// Symmetric in (A, B) bit for bit.
double gaussian_quartic(const Matrix& a, const Matrix& b);

/// E[u_s^T Sigma^{-1} u_t w_s w_t] for a zero-initialized AR(m+n) with
/// theta = (alpha, beta) fit by an AR(m) window: u_t = (y_{t-1}..y_{t-m}),
/// w_t = <beta, v_{t-m}> + eps_t with v_t = (y_{t-1}..y_{t-n}). Computed as
/// two Gaussian quartic forms in eps_{0..t}. Needs 0 <= s < t.
double cross_term_expectation(const ProcessSpec& spec, std::size_t m, std::size_t s, std::size_t t,
                              const Matrix& sigma_inv);

}  // namespace mixreg
