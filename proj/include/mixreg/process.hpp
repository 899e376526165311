#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixreg/linalg.hpp"

namespace mixreg {

enum class ProcessKind { GaussianAR, FiniteMarkov, BlockConstant, IIDGaussian };

std::string_view to_string(ProcessKind kind);
/// Accepts the snake_case names written by to_string (e.g. "gaussian_ar").
ProcessKind parse_process_kind(std::string_view name);

/// How a Gaussian AR simulation leaves its zero initial condition.
struct WarmStart {
  enum class Mode { None, Auto, Fixed };
  Mode mode = Mode::Auto;
  std::size_t steps = 0;  // used when mode == Fixed

  static WarmStart none() { return {Mode::None, 0}; }
  static WarmStart automatic() { return {Mode::Auto, 0}; }
  static WarmStart fixed(std::size_t steps) { return {Mode::Fixed, steps}; }
};

/// Declarative description of a data-generating process. Instances are only
/// built through the named constructors, which validate every invariant, so
/// a ProcessSpec in hand is always simulable.
///
/// Regression view: for GaussianAR the covariate at time t is the lag window
/// (y_{t-l}, ..., y_{t-l-m+1}) with l = lag_offset and m = window, and the
/// target is y_t. The other kinds emit (X, Y) pairs directly.
class ProcessSpec {
 public:
  /// AR(p) driven by iid N(0, noise_std^2) innovations with y_{-k} = 0.
  /// Throws UnstableProcess unless the companion matrix is Schur stable.
  static ProcessSpec gaussian_ar(Vector theta, double noise_std, std::size_t window,
                                 std::size_t lag_offset = 1, WarmStart warm = WarmStart::automatic());

  /// X ~ N(0, covariate_cov), Y = link X + noise_std * eps, iid over time.
  static ProcessSpec iid_gaussian(Matrix covariate_cov, Matrix link, double noise_std);

  /// The iid_gaussian law drawn once per length-k block and repeated k times.
  /// A trailing partial block is allowed.
  static ProcessSpec block_constant(std::size_t block_len, Matrix covariate_cov, Matrix link,
                                    double noise_std);

  /// Finite Markov chain with row-stochastic `transition`; state s emits
  /// (emission_x.row(s), emission_y.row(s)). Without `initial`, the chain must
  /// have a unique stationary law and be aperiodic; an explicit initial law
  /// must itself be stationary.
  static ProcessSpec finite_markov(Matrix transition, Matrix emission_x, Matrix emission_y,
                                   std::optional<Vector> initial = std::nullopt);

  ProcessKind kind() const noexcept { return kind_; }
  const std::string& id() const noexcept { return id_; }
  ProcessSpec& set_id(std::string id) {
    id_ = std::move(id);
    return *this;
  }

  std::size_t covariate_dim() const noexcept { return covariate_dim_; }
  std::size_t target_dim() const noexcept { return target_dim_; }

  // GaussianAR
  const Vector& ar_coeffs() const noexcept { return theta_; }
  std::size_t ar_order() const noexcept { return static_cast<std::size_t>(theta_.size()); }
  std::size_t window() const noexcept { return covariate_dim_; }
  std::size_t lag_offset() const noexcept { return lag_offset_; }
  const WarmStart& warm_start() const noexcept { return warm_; }
  /// Steps simulated and thrown away before the first returned sample.
  std::size_t discard() const noexcept { return discard_; }
  double companion_spectral_radius() const noexcept { return spectral_radius_; }
  /// Order of the padded companion state that covers both the recursion and
  /// the regression view: max(p, lag_offset + window - 1).
  std::size_t state_order() const noexcept;

  // GaussianAR, IIDGaussian, BlockConstant
  double noise_std() const noexcept { return noise_std_; }

  // IIDGaussian, BlockConstant
  const Matrix& covariate_cov() const noexcept { return covariate_cov_; }
  const Matrix& covariate_chol() const noexcept { return covariate_chol_; }
  const Matrix& link() const noexcept { return link_; }
  std::size_t block_len() const noexcept { return block_len_; }

  // FiniteMarkov
  const Matrix& transition() const noexcept { return transition_; }
  const Matrix& emission_x() const noexcept { return emission_x_; }
  const Matrix& emission_y() const noexcept { return emission_y_; }
  /// Law of the first state; stationary by construction.
  const Vector& initial_law() const noexcept { return initial_; }
  std::size_t state_count() const noexcept { return static_cast<std::size_t>(transition_.rows()); }
  /// Column s holds the cumulative sums of transition row s; initial_cdf()
  /// is the cumulative initial law.
  const Matrix& transition_cdf() const noexcept { return transition_cdf_; }
  const Vector& initial_cdf() const noexcept { return initial_cdf_; }

  /// True when every window Z_{s+1..s+L} has a law independent of s, i.e.
  /// fresh simulations of length L sample block marginals exactly. The
  /// warm-started AR counts as stationary (up to its geometric start bias).
  bool stationary_windows() const noexcept;

 private:
  ProcessSpec() = default;

  ProcessKind kind_ = ProcessKind::IIDGaussian;
  std::string id_;
  std::size_t covariate_dim_ = 0;
  std::size_t target_dim_ = 0;

  Vector theta_;
  double noise_std_ = 1.0;
  std::size_t lag_offset_ = 1;
  WarmStart warm_;
  std::size_t discard_ = 0;
  double spectral_radius_ = 0.0;

  Matrix covariate_cov_;
  Matrix covariate_chol_;
  Matrix link_;
  std::size_t block_len_ = 1;

  Matrix transition_;
  Matrix transition_cdf_;
  Matrix emission_x_;
  Matrix emission_y_;
  Vector initial_;
  Vector initial_cdf_;
};

/// Companion-form state space x_{t+1} = A x_t + B eps_{t+1}, y_t = C x_t with
/// x_t = (y_t, y_{t-1}, ..., y_{t-p}) and unit-variance innovations.
struct StateSpace {
  Matrix A;
  Vector B;
  Eigen::RowVectorXd C;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(A.rows()); }
};

/// Sample rows are time steps: xs is n x d_X, ys is n x d_Y.
struct Trajectory {
  Matrix xs;
  Matrix ys;
  std::uint64_t seed = 0;
  std::string spec_id;
  /// Visited states, FiniteMarkov only.
  std::vector<std::size_t> states;

  std::size_t size() const noexcept { return static_cast<std::size_t>(xs.rows()); }
};

/// A = [[theta^T, 0], [I_p, 0]] of size (p+1) x (p+1), B = e_1, C = e_1^T.
StateSpace companion(const Vector& theta);

/// Companion of theta zero-padded to `order` (order >= p).
StateSpace companion(const Vector& theta, std::size_t order);

/// k-step controllability Gramian sum_{j<k} A^j B B^T (A^j)^T, summed from
/// the powers directly. k = 0 gives the zero matrix.
Matrix gramian(const StateSpace& ss, std::size_t k);

struct ConditionalLaw {
  double mean = 0.0;
  double var = 0.0;
};

/// Law of y_{t+k} given x_t: N(C A^k x_t, C Sigma_k C^T).
ConditionalLaw conditional_gaussian(const StateSpace& ss, const Vector& x_t, std::size_t k);

/// Fixed point of Sigma = A Sigma A^T + Q by iteration (tolerance 1e-12 in
/// max norm, at most 10^6 sweeps). Throws NumericalError on non-convergence.
Matrix lyapunov_fixed_point(const Matrix& A, const Matrix& Q);

/// Stationary covariance of the padded AR state (order state_order()),
/// scaled by noise_std^2.
Matrix stationary_state_covariance(const ProcessSpec& spec);

/// Stationary covariance of the regression covariate (the lag window).
Matrix stationary_covariance(const ProcessSpec& spec);

Trajectory simulate_ar(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);
Trajectory simulate_markov(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);
Trajectory simulate_block_constant(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);
Trajectory simulate_iid(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);

/// Dispatches on spec.kind(). Same (spec, n, seed) gives identical output.
Trajectory simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);

/// One draw from the exact marginal law of samples start+1 .. start+len of
/// the process (rows [start, start+len) of a full trajectory).
Trajectory simulate_window(const ProcessSpec& spec, std::size_t start, std::size_t len,
                           std::uint64_t seed);

/// CSV with header t,x_1..x_dX,y_1..y_dY; t counts from 1.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Stationary law of a row-stochastic matrix if it is unique (eigenvalue 1
/// is simple), std::nullopt otherwise.
std::optional<Vector> unique_stationary_law(const Matrix& transition);

/// Throws ArgumentError unless P is square, non-negative, and every row sums
/// to 1 within 1e-12.
void check_row_stochastic(const Matrix& transition);

}  // namespace mixreg
