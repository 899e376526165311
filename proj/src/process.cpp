#include "mixreg/process.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <ostream>

#include "mixreg/csv.hpp"
#include "mixreg/errors.hpp"
#include "mixreg/rng.hpp"

namespace mixreg {

namespace {

constexpr double kStochasticTol = 1e-12;

Matrix checked_cholesky(const Matrix& cov) {
  if (cov.rows() == 0 || cov.rows() != cov.cols()) {
    throw ArgumentError("covariate covariance must be a non-empty square matrix");
  }
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
    throw ArgumentError("covariate covariance must be symmetric");
  }
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success || min_eigenvalue(cov) <= kMinEigenvalue) {
    throw ArgumentError("covariate covariance must be positive definite");
  }
  return llt.matrixL();
}

void check_linear_law(const Matrix& cov, const Matrix& link, double noise_std) {
  if (link.cols() != cov.rows() || link.rows() == 0) {
    throw ArgumentError("link must be d_Y x d_X with d_X matching the covariance");
  }
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw ArgumentError("noise_std must be finite and non-negative");
  }
}

Vector cumulative(const Eigen::Ref<const Vector>& p) {
  Vector c(p.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p[i];
    c[i] = acc;
  }
  if (c.size() > 0) c[c.size() - 1] = 1.0;
  return c;
}

// Draws the linear Gaussian law into row `r` of (xs, ys).
void draw_linear(const ProcessSpec& spec, Rng& rng, Vector& g, Vector& x, Vector& y) {
  for (Eigen::Index j = 0; j < g.size(); ++j) g[j] = rng.gaussian();
  x.noalias() = spec.covariate_chol() * g;
  y.noalias() = spec.link() * x;
  for (Eigen::Index j = 0; j < y.size(); ++j) y[j] += spec.noise_std() * rng.gaussian();
}

// Block-constant samples whose first block has only `first_len` rows left.
Trajectory block_constant_rows(const ProcessSpec& spec, std::size_t first_len, std::size_t n,
                               std::uint64_t seed) {
  Trajectory traj;
  traj.seed = seed;
  traj.spec_id = spec.id();
  traj.xs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.covariate_dim()));
  traj.ys.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.target_dim()));
  Rng rng(seed);
  Vector g(spec.covariate_dim()), x(spec.covariate_dim()), y(spec.target_dim());
  std::size_t row = 0;
  std::size_t len = first_len;
  while (row < n) {
    draw_linear(spec, rng, g, x, y);
    const std::size_t stop = std::min(n, row + len);
    for (; row < stop; ++row) {
      traj.xs.row(static_cast<Eigen::Index>(row)) = x.transpose();
      traj.ys.row(static_cast<Eigen::Index>(row)) = y.transpose();
    }
    len = spec.block_len();
  }
  return traj;
}

Trajectory slice_rows(const Trajectory& full, std::size_t start, std::size_t len) {
  Trajectory out;
  out.seed = full.seed;
  out.spec_id = full.spec_id;
  const auto s = static_cast<Eigen::Index>(start);
  const auto l = static_cast<Eigen::Index>(len);
  out.xs = full.xs.middleRows(s, l);
  out.ys = full.ys.middleRows(s, l);
  if (!full.states.empty()) {
    out.states.assign(full.states.begin() + static_cast<std::ptrdiff_t>(start),
                      full.states.begin() + static_cast<std::ptrdiff_t>(start + len));
  }
  return out;
}

}  // namespace

std::string_view to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::GaussianAR: return "gaussian_ar";
    case ProcessKind::FiniteMarkov: return "finite_markov";
    case ProcessKind::BlockConstant: return "block_constant";
    case ProcessKind::IIDGaussian: return "iid_gaussian";
  }
  return "unknown";
}

ProcessKind parse_process_kind(std::string_view name) {
  if (name == "gaussian_ar") return ProcessKind::GaussianAR;
  if (name == "finite_markov") return ProcessKind::FiniteMarkov;
  if (name == "block_constant") return ProcessKind::BlockConstant;
  if (name == "iid_gaussian") return ProcessKind::IIDGaussian;
  throw ArgumentError("unknown process kind '" + std::string(name) + "'");
}

ProcessSpec ProcessSpec::gaussian_ar(Vector theta, double noise_std, std::size_t window,
                                     std::size_t lag_offset, WarmStart warm) {
  if (theta.size() == 0) throw ArgumentError("AR coefficients must be non-empty");
  if (!(noise_std > 0.0) || !std::isfinite(noise_std)) {
    throw ArgumentError("AR noise_std must be positive");
  }
  if (window == 0) throw ArgumentError("regression window must be at least 1");
  if (lag_offset == 0) throw ArgumentError("lag offset must be at least 1");
  const double rho = spectral_radius(companion(theta).A);
  // Unit roots land within rounding of 1 from either side.
  if (!(rho < 1.0 - 1e-12)) throw UnstableProcess(rho);

  ProcessSpec spec;
  spec.kind_ = ProcessKind::GaussianAR;
  spec.id_ = "gaussian_ar";
  spec.theta_ = std::move(theta);
  spec.noise_std_ = noise_std;
  spec.covariate_dim_ = window;
  spec.target_dim_ = 1;
  spec.lag_offset_ = lag_offset;
  spec.warm_ = warm;
  spec.spectral_radius_ = rho;
  switch (warm.mode) {
    case WarmStart::Mode::None: spec.discard_ = 0; break;
    case WarmStart::Mode::Fixed: spec.discard_ = warm.steps; break;
    case WarmStart::Mode::Auto: {
      const double p = static_cast<double>(spec.theta_.size());
      spec.discard_ = static_cast<std::size_t>(std::ceil(10.0 * p / (1.0 - rho)));
      break;
    }
  }
  return spec;
}

ProcessSpec ProcessSpec::iid_gaussian(Matrix covariate_cov, Matrix link, double noise_std) {
  ProcessSpec spec;
  spec.covariate_chol_ = checked_cholesky(covariate_cov);
  check_linear_law(covariate_cov, link, noise_std);
  spec.kind_ = ProcessKind::IIDGaussian;
  spec.id_ = "iid_gaussian";
  spec.covariate_dim_ = static_cast<std::size_t>(covariate_cov.rows());
  spec.target_dim_ = static_cast<std::size_t>(link.rows());
  spec.covariate_cov_ = std::move(covariate_cov);
  spec.link_ = std::move(link);
  spec.noise_std_ = noise_std;
  return spec;
}

ProcessSpec ProcessSpec::block_constant(std::size_t block_len, Matrix covariate_cov, Matrix link,
                                        double noise_std) {
  if (block_len == 0) throw ArgumentError("block_len must be at least 1");
  ProcessSpec spec = iid_gaussian(std::move(covariate_cov), std::move(link), noise_std);
  spec.kind_ = ProcessKind::BlockConstant;
  spec.id_ = "block_constant";
  spec.block_len_ = block_len;
  return spec;
}

ProcessSpec ProcessSpec::finite_markov(Matrix transition, Matrix emission_x, Matrix emission_y,
                                       std::optional<Vector> initial) {
  check_row_stochastic(transition);
  const auto states = transition.rows();
  if (emission_x.rows() != states || emission_y.rows() != states || emission_x.cols() == 0 ||
      emission_y.cols() == 0) {
    throw ArgumentError("emission tables must have one non-empty row per state");
  }

  Vector law;
  if (initial) {
    law = *initial;
    if (law.size() != states || law.minCoeff() < 0.0 || std::abs(law.sum() - 1.0) > 1e-10) {
      throw ArgumentError("initial law must be a probability vector over the states");
    }
    const double drift = (transition.transpose() * law - law).cwiseAbs().maxCoeff();
    if (drift > 1e-10) throw ArgumentError("initial law is not stationary for the transition matrix");
  } else {
    auto pi = unique_stationary_law(transition);
    if (!pi) throw ArgumentError("transition matrix has no unique stationary law (reducible chain)");
    Eigen::EigenSolver<Matrix> es(transition, false);
    int near_unit = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (std::abs(es.eigenvalues()[i]) > 1.0 - 1e-9) ++near_unit;
    }
    if (near_unit > 1) throw ArgumentError("transition matrix is periodic; the chain does not mix");
    law = *pi;
  }

  ProcessSpec spec;
  spec.kind_ = ProcessKind::FiniteMarkov;
  spec.id_ = "finite_markov";
  spec.covariate_dim_ = static_cast<std::size_t>(emission_x.cols());
  spec.target_dim_ = static_cast<std::size_t>(emission_y.cols());
  spec.transition_cdf_.resize(states, states);
  for (Eigen::Index s = 0; s < states; ++s) {
    spec.transition_cdf_.col(s) = cumulative(transition.row(s).transpose());
  }
  spec.transition_ = std::move(transition);
  spec.emission_x_ = std::move(emission_x);
  spec.emission_y_ = std::move(emission_y);
  spec.initial_cdf_ = cumulative(law);
  spec.initial_ = std::move(law);
  return spec;
}

std::size_t ProcessSpec::state_order() const noexcept {
  return std::max(ar_order(), lag_offset_ + covariate_dim_ - 1);
}

bool ProcessSpec::stationary_windows() const noexcept {
  switch (kind_) {
    case ProcessKind::IIDGaussian:
    case ProcessKind::FiniteMarkov: return true;
    case ProcessKind::GaussianAR: return discard_ > 0;
    case ProcessKind::BlockConstant: return block_len_ == 1;
  }
  return false;
}

void check_row_stochastic(const Matrix& p) {
  if (p.rows() == 0 || p.rows() != p.cols()) {
    throw ArgumentError("transition matrix must be square and non-empty");
  }
  if (p.minCoeff() < 0.0) throw ArgumentError("transition matrix has negative entries");
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    if (std::abs(p.row(r).sum() - 1.0) > kStochasticTol) {
      throw ArgumentError("transition row " + std::to_string(r) + " does not sum to 1");
    }
  }
}

std::optional<Vector> unique_stationary_law(const Matrix& p) {
  const auto s = p.rows();
  Eigen::EigenSolver<Matrix> es(p.transpose(), false);
  int unit = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()[i] - std::complex<double>(1.0, 0.0)) < 1e-9) ++unit;
  }
  if (unit != 1) return std::nullopt;
  // (P^T - I) pi = 0 with sum(pi) = 1, solved as a stacked least-squares system.
  Matrix sys(s + 1, s);
  sys.topRows(s) = p.transpose() - Matrix::Identity(s, s);
  sys.row(s).setOnes();
  Vector rhs = Vector::Zero(s + 1);
  rhs[s] = 1.0;
  Vector pi = sys.colPivHouseholderQr().solve(rhs);
  pi = pi.cwiseMax(0.0);
  return Vector(pi / pi.sum());
}

StateSpace companion(const Vector& theta) {
  if (theta.size() == 0) throw ArgumentError("companion needs at least one coefficient");
  return companion(theta, static_cast<std::size_t>(theta.size()));
}

StateSpace companion(const Vector& theta, std::size_t order) {
  const auto p = static_cast<Eigen::Index>(order);
  if (theta.size() == 0 || p < theta.size()) {
    throw ArgumentError("companion order must be at least the number of coefficients");
  }
  StateSpace ss;
  ss.A = Matrix::Zero(p + 1, p + 1);
  ss.A.row(0).head(theta.size()) = theta.transpose();
  ss.A.bottomLeftCorner(p, p).setIdentity();
  ss.B = Vector::Unit(p + 1, 0);
  ss.C = Eigen::RowVectorXd::Unit(p + 1, 0);
  return ss;
}

Matrix gramian(const StateSpace& ss, std::size_t k) {
  const auto d = ss.A.rows();
  Matrix sum = Matrix::Zero(d, d);
  Vector col = ss.B;  // A^j B
  for (std::size_t j = 0; j < k; ++j) {
    sum.noalias() += col * col.transpose();
    col = ss.A * col;
  }
  return sum;
}

ConditionalLaw conditional_gaussian(const StateSpace& ss, const Vector& x_t, std::size_t k) {
  if (k == 0) throw ArgumentError("conditional_gaussian needs k >= 1");
  if (x_t.size() != ss.A.rows()) throw ArgumentError("state dimension mismatch");
  const Matrix ak = matrix_power(ss.A, k);
  ConditionalLaw law;
  law.mean = (ss.C * ak * x_t)(0);
  law.var = (ss.C * gramian(ss, k) * ss.C.transpose())(0);
  return law;
}

Matrix lyapunov_fixed_point(const Matrix& a, const Matrix& q) {
  constexpr int kMaxSweeps = 1'000'000;
  constexpr double kTol = 1e-12;
  Matrix sigma = q;
  for (int it = 0; it < kMaxSweeps; ++it) {
    Matrix next = a * sigma * a.transpose() + q;
    const double change = (next - sigma).cwiseAbs().maxCoeff();
    sigma = std::move(next);
    if (change <= kTol * std::max(1.0, sigma.cwiseAbs().maxCoeff())) return sym(sigma);
  }
  throw NumericalError("Lyapunov fixed-point iteration did not converge");
}

Matrix stationary_state_covariance(const ProcessSpec& spec) {
  if (spec.kind() != ProcessKind::GaussianAR) {
    throw UnsupportedSpec("stationary_state_covariance needs a GaussianAR spec");
  }
  const StateSpace ss = companion(spec.ar_coeffs(), spec.state_order());
  const double var = spec.noise_std() * spec.noise_std();
  return lyapunov_fixed_point(ss.A, var * ss.B * ss.B.transpose());
}

Matrix stationary_covariance(const ProcessSpec& spec) {
  const Matrix state = stationary_state_covariance(spec);
  const auto l = static_cast<Eigen::Index>(spec.lag_offset());
  const auto m = static_cast<Eigen::Index>(spec.window());
  return state.block(l, l, m, m);
}

Trajectory simulate_ar(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
  if (spec.kind() != ProcessKind::GaussianAR) throw ArgumentError("simulate_ar needs a GaussianAR spec");
  if (n == 0) throw ArgumentError("trajectory length must be at least 1");

  const std::size_t p = spec.ar_order();
  const std::size_t lags = spec.state_order();
  const std::size_t d = spec.discard();
  // y_0 .. y_{d+n}, preceded by `lags` zeros for y_{-1}, y_{-2}, ...
  const std::size_t steps = d + n + 1;
  std::vector<double> y(lags + steps, 0.0);
  const double* theta = spec.ar_coeffs().data();
  const double sd = spec.noise_std();
  Rng rng(seed);
  for (std::size_t t = 0; t < steps; ++t) {
    double* cur = &y[lags + t];
    double acc = 0.0;
    for (std::size_t j = 0; j < p; ++j) acc += theta[j] * cur[-static_cast<std::ptrdiff_t>(j + 1)];
    *cur = acc + sd * rng.gaussian();
  }

  Trajectory traj;
  traj.seed = seed;
  traj.spec_id = spec.id();
  const std::size_t m = spec.window();
  const std::size_t off = spec.lag_offset();
  traj.xs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  traj.ys.resize(static_cast<Eigen::Index>(n), 1);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t t = d + 1 + r;
    const double* cur = &y[lags + t];
    traj.ys(static_cast<Eigen::Index>(r), 0) = *cur;
    for (std::size_t j = 0; j < m; ++j) {
      traj.xs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          cur[-static_cast<std::ptrdiff_t>(off + j)];
    }
  }
  return traj;
}

Trajectory simulate_markov(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
  if (spec.kind() != ProcessKind::FiniteMarkov) {
    throw ArgumentError("simulate_markov needs a FiniteMarkov spec");
  }
  if (n == 0) throw ArgumentError("trajectory length must be at least 1");
  Trajectory traj;
  traj.seed = seed;
  traj.spec_id = spec.id();
  traj.states.resize(n);
  Rng rng(seed);
  const Matrix& cdf = spec.transition_cdf();
  const auto s_count = static_cast<std::size_t>(cdf.rows());
  std::size_t state = rng.categorical({spec.initial_cdf().data(), s_count});
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      state = rng.categorical({cdf.col(static_cast<Eigen::Index>(state)).data(), s_count});
    }
    traj.states[t] = state;
  }
  traj.xs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.covariate_dim()));
  traj.ys.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.target_dim()));
  for (std::size_t t = 0; t < n; ++t) {
    const auto s = static_cast<Eigen::Index>(traj.states[t]);
    traj.xs.row(static_cast<Eigen::Index>(t)) = spec.emission_x().row(s);
    traj.ys.row(static_cast<Eigen::Index>(t)) = spec.emission_y().row(s);
  }
  return traj;
}

Trajectory simulate_block_constant(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
  if (spec.kind() != ProcessKind::BlockConstant) {
    throw ArgumentError("simulate_block_constant needs a BlockConstant spec");
  }
  if (n == 0) throw ArgumentError("trajectory length must be at least 1");
  return block_constant_rows(spec, spec.block_len(), n, seed);
}

Trajectory simulate_iid(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
  if (spec.kind() != ProcessKind::IIDGaussian) throw ArgumentError("simulate_iid needs an IIDGaussian spec");
  if (n == 0) throw ArgumentError("trajectory length must be at least 1");
  return block_constant_rows(spec, 1, n, seed);
}

Trajectory simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
  switch (spec.kind()) {
    case ProcessKind::GaussianAR: return simulate_ar(spec, n, seed);
    case ProcessKind::FiniteMarkov: return simulate_markov(spec, n, seed);
    case ProcessKind::BlockConstant: return simulate_block_constant(spec, n, seed);
    case ProcessKind::IIDGaussian: return simulate_iid(spec, n, seed);
  }
  throw UnsupportedSpec("unknown process kind");
}

Trajectory simulate_window(const ProcessSpec& spec, std::size_t start, std::size_t len,
                           std::uint64_t seed) {
  if (len == 0) throw ArgumentError("window length must be at least 1");
  if (spec.kind() == ProcessKind::BlockConstant) {
    const std::size_t phase = start % spec.block_len();
    return block_constant_rows(spec, spec.block_len() - phase, len, seed);
  }
  if (spec.stationary_windows()) return simulate(spec, len, seed);
  // Zero-initialized AR: the window law depends on its position, so the
  // prefix is re-simulated from t = 0.
  return slice_rows(simulate(spec, start + len, seed), start, len);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  std::vector<std::string> header{"t"};
  for (Eigen::Index j = 0; j < traj.xs.cols(); ++j) header.push_back("x_" + std::to_string(j + 1));
  for (Eigen::Index j = 0; j < traj.ys.cols(); ++j) header.push_back("y_" + std::to_string(j + 1));
  CsvWriter csv(out);
  csv.header(header);
  std::vector<double> row(static_cast<std::size_t>(traj.xs.cols() + traj.ys.cols()));
  for (std::size_t t = 0; t < traj.size(); ++t) {
    std::size_t k = 0;
    const auto r = static_cast<Eigen::Index>(t);
    for (Eigen::Index j = 0; j < traj.xs.cols(); ++j) row[k++] = traj.xs(r, j);
    for (Eigen::Index j = 0; j < traj.ys.cols(); ++j) row[k++] = traj.ys(r, j);
    csv.row(t + 1, row);
  }
}

}  // namespace mixreg
