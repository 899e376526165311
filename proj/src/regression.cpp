#include "mixreg/regression.hpp"

#include <cmath>

#include "mixreg/errors.hpp"

namespace mixreg {

RegressionProblem::RegressionProblem(Matrix sigma_x, Matrix m_star, MomentSource source,
                                     std::optional<Matrix> m_star_std_error)
    : sigma_x_(std::move(sigma_x)),
      m_star_(std::move(m_star)),
      source_(source),
      m_star_se_(std::move(m_star_std_error)) {
  if (sigma_x_.rows() == 0 || sigma_x_.rows() != sigma_x_.cols()) {
    throw ArgumentError("Sigma_X must be a non-empty square matrix");
  }
  if (m_star_.cols() != sigma_x_.rows()) throw ArgumentError("M* must have d_X columns");
  sigma_x_ = sym(sigma_x_);
  const double lo = min_eigenvalue(sigma_x_);
  if (!(lo > kMinEigenvalue)) throw DegenerateDesign(lo, "Sigma_X");
  sqrt_ = sym_sqrt(sigma_x_);
  inv_sqrt_ = sym_inv_sqrt(sigma_x_);
}

Matrix fit_ols(const Matrix& xs, const Matrix& ys) {
  if (xs.rows() != ys.rows() || xs.rows() == 0) throw ArgumentError("fit_ols: xs and ys need the same n >= 1");
  const Matrix gram = xs.transpose() * xs;
  const double lo = min_eigenvalue(gram);
  const double d = static_cast<double>(gram.rows());
  if (!(lo > 1e-10 * gram.trace() / d)) throw DegenerateDesign(lo);
  const Matrix cross = xs.transpose() * ys;  // d_X x d_Y
  return gram.colPivHouseholderQr().solve(cross).transpose();
}

double excess_risk(const Matrix& m, const RegressionProblem& prob) {
  if (m.rows() != prob.m_star().rows() || m.cols() != prob.m_star().cols()) {
    throw ArgumentError("excess_risk: hypothesis shape does not match M*");
  }
  return ((m - prob.m_star()) * prob.sigma_x_sqrt()).squaredNorm();
}

NoiseWalk noise_walk(const Trajectory& traj, const RegressionProblem& prob) {
  if (static_cast<std::size_t>(traj.xs.cols()) != prob.covariate_dim() ||
      static_cast<std::size_t>(traj.ys.cols()) != prob.target_dim()) {
    throw ArgumentError("noise_walk: trajectory dimensions do not match the problem");
  }
  const Matrix z = traj.xs * prob.sigma_x_inv_sqrt();
  const Matrix w = traj.ys - traj.xs * prob.m_star().transpose();
  const auto n = traj.xs.rows();
  const auto dy = w.cols();
  const auto dx = z.cols();
  NoiseWalk out;
  out.v.resize(n, dx * dy);
  for (Eigen::Index c = 0; c < dx; ++c) {
    for (Eigen::Index r = 0; r < dy; ++r) out.v.col(c * dy + r) = w.col(r).cwiseProduct(z.col(c));
  }
  out.s_n = w.transpose() * z / static_cast<double>(n);
  return out;
}

FitResult fit(const Trajectory& traj, const RegressionProblem& prob) {
  FitResult res;
  res.m_hat = fit_ols(traj);
  const Matrix z = traj.xs * prob.sigma_x_inv_sqrt();
  const double n = static_cast<double>(traj.size());
  res.emp_cov_whitened = sym(z.transpose() * z / n);
  const Matrix w = traj.ys - traj.xs * prob.m_star().transpose();
  res.s_n = w.transpose() * z / n;
  res.excess_risk = excess_risk(res.m_hat, prob);
  res.min_eig = min_eigenvalue(res.emp_cov_whitened);
  return res;
}

IdentityResidual error_identity_check(const Trajectory& traj, const RegressionProblem& prob) {
  const FitResult res = fit(traj, prob);
  const Matrix lhs = (res.m_hat - prob.m_star()) * prob.sigma_x_sqrt();
  const Matrix rhs = res.emp_cov_whitened.colPivHouseholderQr().solve(res.s_n.transpose()).transpose();
  IdentityResidual out;
  out.absolute = (lhs - rhs).norm();
  const double scale = std::max(lhs.norm(), rhs.norm());
  out.relative = scale > 0.0 ? out.absolute / scale : 0.0;
  return out;
}

double gaussian_quartic(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw ArgumentError("gaussian_quartic needs two square matrices of the same size");
  }
  return 2.0 * sym(a).cwiseProduct(sym(b)).sum() + a.trace() * b.trace();
}

namespace {

// Second moments E[X X^T], E[Y X^T] of the AR regression view, from the
// padded state covariance `state` (unit noise).
void ar_moments(const ProcessSpec& spec, const Matrix& state, Matrix& xx, Matrix& yx) {
  const auto l = static_cast<Eigen::Index>(spec.lag_offset());
  const auto m = static_cast<Eigen::Index>(spec.window());
  xx = state.block(l, l, m, m);
  yx = state.block(0, l, 1, m);
}

RegressionProblem from_moments(const Matrix& xx, const Matrix& yx) {
  const Matrix s = sym(xx);
  const double lo = min_eigenvalue(s);
  if (!(lo > kMinEigenvalue)) throw DegenerateDesign(lo, "Sigma_X");
  const Matrix m_star = s.colPivHouseholderQr().solve(yx.transpose()).transpose();
  return RegressionProblem(s, m_star, MomentSource::Analytic);
}

}  // namespace

RegressionProblem population_optimum(const ProcessSpec& spec, std::optional<std::size_t> horizon) {
  switch (spec.kind()) {
    case ProcessKind::IIDGaussian:
    case ProcessKind::BlockConstant:
      return RegressionProblem(spec.covariate_cov(), spec.link(), MomentSource::Analytic);
    case ProcessKind::FiniteMarkov: {
      const Vector& pi = spec.initial_law();
      const Matrix& ex = spec.emission_x();
      const Matrix& ey = spec.emission_y();
      const Matrix xx = ex.transpose() * pi.asDiagonal() * ex;
      const Matrix yx = ey.transpose() * pi.asDiagonal() * ex;
      return from_moments(xx, yx);
    }
    case ProcessKind::GaussianAR: {
      const double var = spec.noise_std() * spec.noise_std();
      Matrix xx, yx;
      if (spec.discard() > 0) {
        ar_moments(spec, stationary_state_covariance(spec), xx, yx);
        return from_moments(xx, yx);
      }
      if (!horizon || *horizon == 0) {
        throw ArgumentError("a zero-initialized AR needs the sample horizon for its population optimum");
      }
      // Cov(x_t) = var * Sigma_{t+1}; samples are t = 1 .. horizon.
      const StateSpace ss = companion(spec.ar_coeffs(), spec.state_order());
      const Matrix bb = ss.B * ss.B.transpose();
      Matrix p = bb;  // Sigma_1
      Matrix acc_xx = Matrix::Zero(static_cast<Eigen::Index>(spec.window()),
                                   static_cast<Eigen::Index>(spec.window()));
      Matrix acc_yx = Matrix::Zero(1, static_cast<Eigen::Index>(spec.window()));
      for (std::size_t t = 1; t <= *horizon; ++t) {
        p = ss.A * p * ss.A.transpose() + bb;
        ar_moments(spec, p, xx, yx);
        acc_xx += xx;
        acc_yx += yx;
      }
      const double h = static_cast<double>(*horizon);
      return from_moments(var * acc_xx / h, var * acc_yx / h);
    }
  }
  throw UnsupportedSpec("unknown process kind");
}

RegressionProblem population_optimum_mc(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                                        std::size_t batches) {
  if (batches < 2 || n < 2 * batches) throw ArgumentError("population_optimum_mc needs n >= 2 * batches >= 4");
  const Trajectory traj = simulate(spec, n, seed);
  const double nn = static_cast<double>(n);
  const Matrix xx = traj.xs.transpose() * traj.xs / nn;
  const Matrix m_star = fit_ols(traj);

  const auto len = static_cast<Eigen::Index>(n / batches);
  Matrix mean = Matrix::Zero(m_star.rows(), m_star.cols());
  Matrix sq = Matrix::Zero(m_star.rows(), m_star.cols());
  for (std::size_t b = 0; b < batches; ++b) {
    const auto start = static_cast<Eigen::Index>(b) * len;
    const Matrix mb = fit_ols(traj.xs.middleRows(start, len), traj.ys.middleRows(start, len));
    mean += mb;
    sq += mb.cwiseProduct(mb);
  }
  const double k = static_cast<double>(batches);
  mean /= k;
  const Matrix var = (sq / k - mean.cwiseProduct(mean)) * (k / (k - 1.0));
  const Matrix se = (var.cwiseMax(0.0) / k).cwiseSqrt();
  return RegressionProblem(xx, m_star, MomentSource::MonteCarlo, se);
}

double cross_term_expectation(const ProcessSpec& spec, std::size_t m, std::size_t s, std::size_t t,
                              const Matrix& sigma_inv) {
  if (spec.kind() != ProcessKind::GaussianAR) throw UnsupportedSpec("cross_term_expectation needs a GaussianAR spec");
  if (s >= t) throw ArgumentError("cross_term_expectation needs s < t");
  const std::size_t p = spec.ar_order();
  if (m == 0 || m > p) throw ArgumentError("fit window must satisfy 1 <= m <= p");
  if (sigma_inv.rows() != static_cast<Eigen::Index>(m) || sigma_inv.cols() != static_cast<Eigen::Index>(m)) {
    throw ArgumentError("sigma_inv must be m x m");
  }
  const std::size_t nv = p - m;
  if (nv == 0) return 0.0;
  const Vector beta = spec.ar_coeffs().tail(static_cast<Eigen::Index>(nv));

  const StateSpace ss = companion(spec.ar_coeffs());
  const auto dim = ss.A.rows();
  const auto cols = static_cast<Eigen::Index>(t + 1);
  // powers[k] = A^k B
  Matrix powers(dim, cols);
  powers.col(0) = ss.B;
  for (Eigen::Index k = 1; k < cols; ++k) powers.col(k) = ss.A * powers.col(k - 1);
  // x_tau = M_tau eps with column j = A^{tau-j} B for j <= tau, 0 otherwise.
  auto m_of = [&](long tau) {
    Matrix mt = Matrix::Zero(dim, cols);
    for (long j = 0; j <= tau; ++j) mt.col(j) = powers.col(tau - j);
    return mt;
  };
  const Matrix pu = Matrix::Identity(dim, dim).middleRows(1, static_cast<Eigen::Index>(m));
  const Matrix pv = Matrix::Identity(dim, dim).middleRows(1, static_cast<Eigen::Index>(nv));

  const long ls = static_cast<long>(s);
  const long lt = static_cast<long>(t);
  const long lm = static_cast<long>(m);
  const Matrix q1 = m_of(ls).transpose() * pu.transpose() * sigma_inv * pu * m_of(lt);
  const Eigen::RowVectorXd bs = beta.transpose() * pv * m_of(ls - lm);
  const Eigen::RowVectorXd bt = beta.transpose() * pv * m_of(lt - lm);
  const Matrix q2 = bs.transpose() * bt;
  Matrix q3 = Matrix::Zero(cols, cols);
  q3.row(static_cast<Eigen::Index>(s)) = bt;

  const double var = spec.noise_std() * spec.noise_std();
  return var * var * (gaussian_quartic(q1, q2) + gaussian_quartic(q1, q3));
}

}  // namespace mixreg
