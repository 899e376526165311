#include "mixreg/estimators.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mixreg/errors.hpp"
#include "mixreg/rng.hpp"

namespace mixreg {

namespace {

// Sub-stream tags, so the h search and the spectrum trials never share seeds
// with each other or with a caller's own use of the base seed.
constexpr std::uint64_t kDirectionStream = 0x6469726563ULL;

Matrix trial_noise(const ProcessSpec& spec, const RegressionProblem& prob, std::size_t n,
                   std::uint64_t seed) {
  return noise_walk(simulate(spec, n, seed), prob).v;
}

// Columns are directions v with v^T Sigma_X v = 1.
Matrix h_directions(const RegressionProblem& prob, std::size_t random_dirs, std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(prob.covariate_dim());
  if (d == 1) return prob.sigma_x_inv_sqrt();
  Eigen::SelfAdjointEigenSolver<Matrix> es(prob.sigma_x());
  Matrix u(d, d + static_cast<Eigen::Index>(random_dirs));
  u.leftCols(d) = es.eigenvectors();
  Rng rng(derive_seed(seed, kDirectionStream));
  for (Eigen::Index c = d; c < u.cols(); ++c) {
    for (Eigen::Index r = 0; r < d; ++r) u(r, c) = rng.gaussian();
    u.col(c).normalize();
  }
  return prob.sigma_x_inv_sqrt() * u;
}

struct MomentAcc {
  Vector sum4;
  Vector sum2;

  void add(const Matrix& xs, const Matrix& dirs) {
    const Matrix p = xs * dirs;
    sum2 += p.cwiseAbs2().colwise().sum().transpose();
    sum4 += p.cwiseAbs2().cwiseAbs2().colwise().sum().transpose();
  }
  void merge(const MomentAcc& o) {
    sum4 += o.sum4;
    sum2 += o.sum2;
  }
  double h2() const {
    double best = 0.0;
    for (Eigen::Index c = 0; c < sum4.size(); ++c) {
      if (sum2[c] > 0.0) best = std::max(best, sum4[c] / sum2[c]);
    }
    return best;
  }
};

std::size_t h_trial_count(double budget, std::size_t dirs, std::size_t n, std::size_t n_mc) {
  const double per_trial = static_cast<double>(dirs) * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(budget / std::max(per_trial, 1.0));
  return std::clamp<std::size_t>(k, 1, n_mc);
}

struct SpectrumAcc {
  Matrix sum_b;               // blocks x D
  std::vector<Matrix> blocks_bb;  // per block, when kept
  Matrix odd_bb;
  Matrix even_bb;
  double moment = 0.0;        // sum over trials and blocks of ||B_i||^s (exact centering)
  MomentAcc h;
  Matrix t_sum;               // n x D
  Matrix t_sq;
};

double pow_norm(double sq_norm, double s) { return std::pow(sq_norm, s / 2.0); }

}  // namespace

bool noise_mean_is_zero(const ProcessSpec& spec, const RegressionProblem& prob) {
  if (prob.source() != MomentSource::Analytic) return false;
  return spec.kind() != ProcessKind::GaussianAR || spec.discard() > 0;
}

NoiseSpectrum noise_spectrum(const ProcessSpec& spec, const RegressionProblem& prob,
                             const BlockPartition& partition, std::size_t n_mc, std::uint64_t seed,
                             const SpectrumOptions& opt) {
  if (n_mc < 1000) throw ArgumentError("noise_spectrum needs n_mc >= 1000");
  if (!(opt.moment_s >= 2.0)) throw ArgumentError("moment order s must be at least 2");
  const std::size_t n = partition.n();
  const auto blocks = static_cast<Eigen::Index>(partition.block_count());
  const auto dim = static_cast<Eigen::Index>(prob.covariate_dim() * prob.target_dim());
  const bool keep_blocks = partition.block_count() <= opt.max_kept_blocks;
  const bool exact = noise_mean_is_zero(spec, prob);
  const double s = opt.moment_s;
  const double amax_s = std::pow(static_cast<double>(partition.a_max()), s / 2.0);

  const Matrix dirs = opt.estimate_h
                          ? h_directions(prob, opt.h_directions_per_dim * prob.covariate_dim(), seed)
                          : Matrix(static_cast<Eigen::Index>(prob.covariate_dim()), 0);
  const std::size_t h_trials =
      opt.estimate_h ? h_trial_count(opt.h_sample_budget, static_cast<std::size_t>(dirs.cols()), n, n_mc) : 0;

  auto init = [&] {
    SpectrumAcc a;
    a.sum_b = Matrix::Zero(blocks, dim);
    if (keep_blocks) a.blocks_bb.assign(static_cast<std::size_t>(blocks), Matrix::Zero(dim, dim));
    a.odd_bb = Matrix::Zero(dim, dim);
    a.even_bb = Matrix::Zero(dim, dim);
    a.h.sum4 = Vector::Zero(dirs.cols());
    a.h.sum2 = Vector::Zero(dirs.cols());
    if (opt.per_time_variance) {
      a.t_sum = Matrix::Zero(static_cast<Eigen::Index>(n), dim);
      a.t_sq = Matrix::Zero(static_cast<Eigen::Index>(n), dim);
    }
    return a;
  };
  auto body = [&](SpectrumAcc& a, std::size_t k) {
    const Trajectory traj = simulate(spec, n, derive_seed(seed, k));
    const Matrix v = noise_walk(traj, prob).v;
    if (k < h_trials) a.h.add(traj.xs, dirs);
    if (opt.per_time_variance) {
      a.t_sum += v;
      a.t_sq += v.cwiseAbs2();
    }
    const Matrix b = block_sums(v, partition);
    a.sum_b += b;
    for (Eigen::Index i = 0; i < blocks; ++i) {
      const auto row = b.row(i);
      if (keep_blocks) {
        a.blocks_bb[static_cast<std::size_t>(i)].noalias() += row.transpose() * row;
      } else if (BlockPartition::in_odd_union(static_cast<std::size_t>(i))) {
        a.odd_bb.noalias() += row.transpose() * row;
      } else {
        a.even_bb.noalias() += row.transpose() * row;
      }
      if (exact) a.moment += pow_norm(row.squaredNorm(), s);
    }
  };
  auto merge = [&](SpectrumAcc& total, SpectrumAcc&& a) {
    total.sum_b += a.sum_b;
    for (std::size_t i = 0; i < total.blocks_bb.size(); ++i) total.blocks_bb[i] += a.blocks_bb[i];
    total.odd_bb += a.odd_bb;
    total.even_bb += a.even_bb;
    total.moment += a.moment;
    total.h.merge(a.h);
    if (opt.per_time_variance) {
      total.t_sum += a.t_sum;
      total.t_sq += a.t_sq;
    }
  };
  SpectrumAcc acc = reduce_indices<SpectrumAcc>(n_mc, opt.exec, init, body, merge);

  const double trials = static_cast<double>(n_mc);
  const Matrix mu = acc.sum_b / trials;  // per-block mean of the block sums
  NoiseSpectrum out;
  out.n = n;
  out.n_mc = n_mc;
  out.d_x = prob.covariate_dim();
  out.d_y = prob.target_dim();
  out.moment_s = s;
  out.exact_centering = exact;
  out.centering_offset = mu.colwise().sum().norm() / static_cast<double>(n);

  // Centered second moments: exact centering divides by N; Monte Carlo
  // centering uses the unbiased (S - N mu mu^T) / (N - 1).
  auto centered = [&](const Matrix& second, const Matrix& mean_outer) -> Matrix {
    if (exact) return second / trials;
    return (second - trials * mean_outer) / (trials - 1.0);
  };
  out.sigma_odd = Matrix::Zero(dim, dim);
  out.sigma_even = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < blocks; ++i) {
    const Matrix outer = mu.row(i).transpose() * mu.row(i);
    Matrix sigma_i;
    if (keep_blocks) {
      sigma_i = centered(acc.blocks_bb[static_cast<std::size_t>(i)], outer);
      out.sigma_blocks.push_back(sigma_i);
      (BlockPartition::in_odd_union(static_cast<std::size_t>(i)) ? out.sigma_odd : out.sigma_even) += sigma_i;
    } else if (!exact) {
      (BlockPartition::in_odd_union(static_cast<std::size_t>(i)) ? out.sigma_odd : out.sigma_even) -=
          trials * outer / (trials - 1.0);
    }
  }
  if (!keep_blocks) {
    const double scale = exact ? 1.0 / trials : 1.0 / (trials - 1.0);
    out.sigma_odd += acc.odd_bb * scale;
    out.sigma_even += acc.even_bb * scale;
  }
  out.sigma_odd = sym(out.sigma_odd);
  out.sigma_even = sym(out.sigma_even);
  out.sigma_agg = (out.sigma_odd + out.sigma_even) / static_cast<double>(n);
  out.sigma2 = op_norm_psd(out.sigma_agg);
  out.edim = out.sigma2 > 0.0 ? edim(out.sigma_agg) : 0.0;

  const double m = static_cast<double>(partition.m());
  if (exact) {
    out.block_moment_s = acc.moment / trials / amax_s / m;
  } else {
    // Second pass over the same trials, centered with the pass-one means.
    auto moment_body = [&](double& total, std::size_t k) {
      const Matrix b = block_sums(trial_noise(spec, prob, n, derive_seed(seed, k)), partition) - mu;
      for (Eigen::Index i = 0; i < blocks; ++i) total += pow_norm(b.row(i).squaredNorm(), s);
    };
    const double moment = reduce_indices<double>(
        n_mc, opt.exec, [] { return 0.0; }, moment_body, [](double& t, double&& x) { t += x; });
    out.block_moment_s = moment / trials / amax_s / m;
  }

  if (opt.estimate_h) {
    out.h2 = acc.h.h2();
    out.h = std::sqrt(out.h2);
  }
  if (opt.per_time_variance) {
    const Matrix mean_t = acc.t_sum / trials;
    const Matrix var_t = exact ? Matrix(acc.t_sq / trials)
                               : Matrix((acc.t_sq - trials * mean_t.cwiseAbs2()) / (trials - 1.0));
    out.max_sample_var = var_t.rowwise().sum().maxCoeff();
  } else {
    out.max_sample_var = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double estimate_h2(const ProcessSpec& spec, const RegressionProblem& prob, std::size_t n,
                   std::size_t trials, std::size_t random_dirs, std::uint64_t seed, Execution exec) {
  if (n == 0 || trials == 0) throw ArgumentError("estimate_h2 needs n, trials >= 1");
  const Matrix dirs = h_directions(prob, random_dirs, seed);
  MomentAcc acc = reduce_indices<MomentAcc>(
      trials, exec,
      [&] {
        return MomentAcc{Vector::Zero(dirs.cols()), Vector::Zero(dirs.cols())};
      },
      [&](MomentAcc& a, std::size_t k) { a.add(simulate(spec, n, derive_seed(seed, k)).xs, dirs); },
      [](MomentAcc& t, MomentAcc&& a) { t.merge(a); });
  return acc.h2();
}

std::map<std::size_t, Matrix> clt_variance(const ProcessSpec& spec, const RegressionProblem& prob,
                                           const std::vector<std::size_t>& lengths, std::size_t n_mc,
                                           std::uint64_t seed, Execution exec) {
  if (lengths.empty()) throw ArgumentError("clt_variance needs at least one block length");
  if (n_mc < 2) throw ArgumentError("clt_variance needs n_mc >= 2");
  const auto dim = static_cast<Eigen::Index>(prob.covariate_dim() * prob.target_dim());
  const bool exact = noise_mean_is_zero(spec, prob);
  std::map<std::size_t, Matrix> out;
  for (std::size_t len : lengths) {
    if (len == 0) throw ArgumentError("block lengths must be positive");
    const std::uint64_t base = derive_seed(seed, len);
    struct Acc {
      Vector sum;
      Matrix sq;
    };
    Acc acc = reduce_indices<Acc>(
        n_mc, exec, [&] { return Acc{Vector::Zero(dim), Matrix::Zero(dim, dim)}; },
        [&](Acc& a, std::size_t k) {
          const Vector b = trial_noise(spec, prob, len, derive_seed(base, k)).colwise().sum().transpose();
          a.sum += b;
          a.sq.noalias() += b * b.transpose();
        },
        [](Acc& t, Acc&& a) {
          t.sum += a.sum;
          t.sq += a.sq;
        });
    const double trials = static_cast<double>(n_mc);
    const Vector mu = acc.sum / trials;
    const Matrix cov = exact ? Matrix(acc.sq / trials)
                             : Matrix((acc.sq - trials * mu * mu.transpose()) / (trials - 1.0));
    out[len] = sym(cov) / static_cast<double>(len);
  }
  return out;
}

RatioEstimate estimate_r(const ProcessSpec& spec, const RegressionProblem& prob,
                         const BlockPartition& partition, std::size_t n_mc, std::uint64_t seed,
                         double s, Execution exec) {
  if (n_mc < 2) throw ArgumentError("estimate_r needs n_mc >= 2");
  const auto blocks = static_cast<Eigen::Index>(partition.block_count());
  const auto dim = static_cast<Eigen::Index>(prob.covariate_dim() * prob.target_dim());
  const double trials = static_cast<double>(n_mc);
  auto resample_sums = [&](std::size_t k) {
    const Trajectory traj = decoupled_resample(spec, partition, derive_seed(seed, k));
    return block_sums(noise_walk(traj, prob).v, partition);
  };

  Matrix mu = Matrix::Zero(blocks, dim);
  if (!noise_mean_is_zero(spec, prob)) {
    mu = reduce_indices<Matrix>(
             n_mc, exec, [&] { return Matrix(Matrix::Zero(blocks, dim)); },
             [&](Matrix& a, std::size_t k) { a += resample_sums(k); },
             [](Matrix& t, Matrix&& a) { t += a; }) /
         trials;
  }

  struct Acc {
    double norm[2] = {0.0, 0.0};
    double norm_sq[2] = {0.0, 0.0};
    double moment[2] = {0.0, 0.0};
    Matrix second[2];
  };
  Acc acc = reduce_indices<Acc>(
      n_mc, exec,
      [&] {
        Acc a;
        a.second[0] = Matrix::Zero(dim, dim);
        a.second[1] = Matrix::Zero(dim, dim);
        return a;
      },
      [&](Acc& a, std::size_t k) {
        const Matrix b = resample_sums(k) - mu;
        Vector total[2] = {Vector::Zero(dim), Vector::Zero(dim)};
        for (Eigen::Index i = 0; i < blocks; ++i) {
          const int u = BlockPartition::in_odd_union(static_cast<std::size_t>(i)) ? 0 : 1;
          const auto row = b.row(i);
          total[u] += row.transpose();
          a.second[u].noalias() += row.transpose() * row;
          a.moment[u] += pow_norm(row.squaredNorm(), s);
        }
        const double sizes[2] = {static_cast<double>(partition.odd_size()),
                                 static_cast<double>(partition.even_size())};
        for (int u = 0; u < 2; ++u) {
          const double nrm = total[u].norm() / std::sqrt(sizes[u]);
          a.norm[u] += nrm;
          a.norm_sq[u] += nrm * nrm;
        }
      },
      [](Acc& t, Acc&& a) {
        for (int u = 0; u < 2; ++u) {
          t.norm[u] += a.norm[u];
          t.norm_sq[u] += a.norm_sq[u];
          t.moment[u] += a.moment[u];
          t.second[u] += a.second[u];
        }
      });

  RatioEstimate out;
  const std::size_t sizes[2] = {partition.odd_size(), partition.even_size()};
  double lambda[2];
  double best = -1.0;
  double best_se = 0.0;
  for (int u = 0; u < 2; ++u) {
    lambda[u] = op_norm_psd(sym(acc.second[u] / trials)) / static_cast<double>(sizes[u]);
    const double mean = acc.norm[u] / trials;
    const double var = std::max(0.0, (acc.norm_sq[u] / trials - mean * mean) * trials / (trials - 1.0));
    if (lambda[u] <= std::numeric_limits<double>::min()) {
      out.degenerate = true;
      continue;
    }
    const double ratio = mean / std::sqrt(lambda[u]);
    if (ratio > best) {
      best = ratio;
      best_se = std::sqrt(var / trials) / std::sqrt(lambda[u]);
    }
  }
  out.lambda_odd = lambda[0];
  out.lambda_even = lambda[1];
  out.mean_norm_odd = acc.norm[0] / trials;
  out.mean_norm_even = acc.norm[1] / trials;
  out.block_moment_odd = acc.moment[0] / trials;
  out.block_moment_even = acc.moment[1] / trials;
  if (out.degenerate) {
    out.r = 0.0;
    out.r_se = 0.0;
  } else {
    out.r = best * best;
    out.r_se = 2.0 * best * best_se;
  }
  return out;
}

TruncationCheck truncation_mass_check(const ProcessSpec& spec, const RegressionProblem& prob,
                                      const BlockPartition& partition, std::size_t block, Vector v,
                                      double tau, std::size_t n_mc, std::uint64_t seed, Execution exec) {
  if (!(tau > 0.0)) throw ArgumentError("truncation level must be positive");
  if (n_mc < 2) throw ArgumentError("truncation_mass_check needs n_mc >= 2");
  if (block >= partition.block_count()) throw ArgumentError("block index outside the partition");
  if (v.size() != static_cast<Eigen::Index>(prob.covariate_dim())) throw ArgumentError("direction has the wrong size");
  const double scale = std::sqrt(v.dot(prob.sigma_x() * v));
  if (!(scale > 0.0)) throw ArgumentError("direction must be non-zero");
  v /= scale;

  const std::size_t begin = partition.begin(block);
  const std::size_t len = partition.length(block);
  const double tau2 = tau * tau;
  struct Acc {
    Vector q;
    Vector q2;
    double s = 0, s2 = 0, f = 0, f2 = 0, sf = 0;
  };
  Acc acc = reduce_indices<Acc>(
      n_mc, exec,
      [&] {
        Acc a;
        a.q = Vector::Zero(static_cast<Eigen::Index>(len));
        a.q2 = Vector::Zero(static_cast<Eigen::Index>(len));
        return a;
      },
      [&](Acc& a, std::size_t k) {
        const Trajectory t = simulate_window(spec, begin, len, derive_seed(seed, k));
        const Vector q = (t.xs * v).cwiseAbs2();
        a.q += q;
        a.q2 += q.cwiseAbs2();
        const double sum = q.sum();
        const double kept = sum / static_cast<double>(len) <= tau2 ? sum : 0.0;
        a.s += sum;
        a.s2 += sum * sum;
        a.f += kept;
        a.f2 += kept * kept;
        a.sf += sum * kept;
      },
      [](Acc& t, Acc&& a) {
        t.q += a.q;
        t.q2 += a.q2;
        t.s += a.s;
        t.s2 += a.s2;
        t.f += a.f;
        t.f2 += a.f2;
        t.sf += a.sf;
      });

  const double nn = static_cast<double>(n_mc);
  TruncationCheck out;
  for (Eigen::Index i = 0; i < acc.q.size(); ++i) {
    if (acc.q[i] > 0.0) out.h2 = std::max(out.h2, acc.q2[i] / acc.q[i]);
  }
  const double c = 1.0 - out.h2 / tau2;
  const double es = acc.s / nn;
  const double ef = acc.f / nn;
  out.second_moment = es;
  out.lhs = c * es;
  out.rhs = ef;
  const double var_s = acc.s2 / nn - es * es;
  const double var_f = acc.f2 / nn - ef * ef;
  const double cov = acc.sf / nn - es * ef;
  const double var_d = std::max(0.0, var_f + c * c * var_s - 2.0 * c * cov) * nn / (nn - 1.0);
  out.se = std::sqrt(var_d / nn);
  out.holds = out.lhs <= out.rhs + 3.0 * out.se;
  return out;
}

}  // namespace mixreg
