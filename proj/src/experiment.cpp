#include "mixreg/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "mixreg/csv.hpp"
#include "mixreg/errors.hpp"
#include "mixreg/estimators.hpp"
#include "mixreg/mixing.hpp"
#include "mixreg/regression.hpp"
#include "mixreg/rng.hpp"

namespace mixreg {

namespace {

constexpr std::uint64_t kTrialStream = 0x747269616cULL;
constexpr std::uint64_t kSpectrumStream = 0x73706563ULL;
constexpr std::uint64_t kRatioStream = 0x726174696fULL;
constexpr std::uint64_t kMomentStream = 0x68ULL;

std::uint64_t stream_seed(std::uint64_t base, std::size_t n, std::uint64_t tag) {
  return derive_seed(derive_seed(base, n), tag);
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

MixingProfile profile_for(const ExperimentConfig& cfg, const BlockPartition& partition) {
  return profile_for_spec(cfg.process, std::max(cfg.max_gap, partition.a_max()), partition.n());
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t k) {
  return derive_seed(stream_seed(base, n, kTrialStream), k);
}

std::vector<TrialResult> run_trials(const ProcessSpec& spec, const RegressionProblem& prob, std::size_t n,
                                    std::size_t trials, std::uint64_t seed, Execution exec) {
  std::vector<TrialResult> out(trials);
  for_each_index(trials, exec, [&](std::size_t k) {
    TrialResult& r = out[k];
    r.seed = trial_seed(seed, n, k);
    const Trajectory traj = simulate(spec, n, r.seed);
    try {
      const FitResult f = fit(traj, prob);
      r.excess_risk = f.excess_risk;
      r.min_eig = f.min_eig;
      r.s_n_norm = f.s_n.norm();
    } catch (const DegenerateDesign& e) {
      r.degenerate = true;
      r.excess_risk = std::numeric_limits<double>::infinity();
      r.min_eig = e.min_eigenvalue();
      r.s_n_norm = noise_walk(traj, prob).s_n.norm();
    }
  });
  return out;
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ArgumentError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = std::ceil(q * static_cast<double>(values.size()));
  const auto idx = static_cast<std::size_t>(std::max(pos, 1.0)) - 1;
  return values[std::min(idx, values.size() - 1)];
}

double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

double fit_log_slope(const std::vector<std::size_t>& ns, const std::vector<double>& values) {
  if (ns.size() != values.size()) throw ArgumentError("slope fit needs one value per n");
  if (ns.size() < 4) throw ArgumentError("slope fit needs at least 4 sample sizes");
  Matrix a(static_cast<Eigen::Index>(ns.size()), 2);
  Vector b(static_cast<Eigen::Index>(ns.size()));
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == 0 || !(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw ArgumentError("slope fit needs positive, finite values");
    }
    a(static_cast<Eigen::Index>(i), 0) = 1.0;
    a(static_cast<Eigen::Index>(i), 1) = std::log(static_cast<double>(ns[i]));
    b[static_cast<Eigen::Index>(i)] = std::log(values[i]);
  }
  return a.colPivHouseholderQr().solve(b)[1];
}

BoundEvaluation evaluate_bound(const ExperimentConfig& cfg, std::size_t n, Execution exec,
                               bool per_time_variance) {
  BlockPartition partition = cfg.partition.for_n(n);
  const RegressionProblem prob = population_optimum(cfg.process, n);
  SpectrumOptions opt;
  opt.moment_s = cfg.moment_s;
  opt.exec = exec;
  opt.per_time_variance = per_time_variance;
  NoiseSpectrum spectrum =
      noise_spectrum(cfg.process, prob, partition, cfg.n_mc, stream_seed(cfg.seed, n, kSpectrumStream), opt);
  BoundReport report = main_bound(spectrum, partition, profile_for(cfg, partition), cfg.delta, cfg.constants);
  return {std::move(partition), std::move(spectrum), std::move(report)};
}

BoundReport evaluate_corollary(const ExperimentConfig& cfg, const BoundEvaluation& eval) {
  const auto& sp = eval.spectrum;
  if (sp.d_y != 1) throw UnsupportedSpec("the corollary form needs a one-dimensional target");
  if (eval.partition.a_max() != eval.partition.a_min()) {
    throw UnsupportedSpec("the corollary form needs equal block lengths (2 tau | n)");
  }
  CorollaryInput in;
  in.tau = eval.partition.a_max();
  in.n = eval.partition.n();
  in.d_x = sp.d_x;
  in.sigma2 = sp.sigma2;
  in.h = sp.h;
  in.s = sp.moment_s;
  // block_moment_s averages over m; the corollary wants the per-block mean,
  // normalized by sqrt(tau d_X) instead of sqrt(tau).
  in.block_moment = sp.block_moment_s / 2.0 / std::pow(static_cast<double>(sp.d_x), sp.moment_s / 2.0);
  return corollary_bound(in, profile_for(cfg, eval.partition), cfg.delta, cfg.constants);
}

std::vector<CoverageReport> run_coverage(const ExperimentConfig& cfg, Execution exec) {
  if (cfg.trials < 100) throw ArgumentError("coverage experiments need at least 100 trials");
  std::vector<CoverageReport> reports;
  for (std::size_t n : cfg.ns) {
    BoundEvaluation eval = evaluate_bound(cfg, n, exec);
    const RegressionProblem prob = population_optimum(cfg.process, n);
    CoverageReport rep;
    rep.n = n;
    rep.bound = eval.report.bound_value;
    rep.trials = cfg.trials;
    rep.report = std::move(eval.report);
    rep.results = run_trials(cfg.process, prob, n, cfg.trials, cfg.seed, exec);
    // Risks within rounding of a zero bound count as covered.
    const double slack = 1e-24 * (1.0 + (prob.m_star() * prob.sigma_x_sqrt()).squaredNorm());
    std::vector<double> risks;
    std::size_t covered = 0;
    for (const auto& r : rep.results) {
      risks.push_back(r.excess_risk);
      if (r.degenerate) ++rep.degenerate;
      if (!r.degenerate && r.excess_risk <= rep.bound + slack) ++covered;
    }
    rep.coverage = cfg.trials ? static_cast<double>(covered) / static_cast<double>(cfg.trials) : 0.0;
    rep.quantile = empirical_quantile(risks, 1.0 - cfg.delta);
    rep.median = median(risks);
    reports.push_back(std::move(rep));
  }
  return reports;
}

void write_coverage_outputs(const std::string& dir, const std::vector<CoverageReport>& reports) {
  {
    auto out = open_output(dir, "coverage.csv");
    CsvWriter csv(out);
    csv.header({"n", "bound", "quantile", "coverage"});
    for (const auto& r : reports) csv.row(r.n, r.bound, r.quantile, r.coverage);
  }
  {
    auto out = open_output(dir, "coverage_detail.csv");
    auto header = BoundReport::csv_header();
    for (const char* extra : {"quantile", "coverage", "median", "trials", "degenerate"}) header.push_back(extra);
    CsvWriter(out).header(header);
    for (const auto& r : reports) {
      std::ostringstream row;
      r.report.write_csv_row(row);
      std::string line = row.str();
      line.pop_back();
      out << line << ',' << format_double(r.quantile) << ',' << format_double(r.coverage) << ','
          << format_double(r.median) << ',' << r.trials << ',' << r.degenerate << '\n';
    }
  }
  {
    auto out = open_output(dir, "risks.csv");
    CsvWriter csv(out);
    csv.header({"n", "trial", "seed", "excess_risk", "min_eig", "s_n_norm", "degenerate"});
    for (const auto& r : reports) {
      for (std::size_t k = 0; k < r.results.size(); ++k) {
        const auto& t = r.results[k];
        csv.row(r.n, k, t.seed, t.excess_risk, t.min_eig, t.s_n_norm, t.degenerate);
      }
    }
  }
}

SlopeReport rate_slope(const ExperimentConfig& cfg, Execution exec) {
  if (cfg.ns.size() < 4) throw ArgumentError("rate_slope needs at least 4 values of n");
  SlopeReport rep;
  for (std::size_t n : cfg.ns) {
    const RegressionProblem prob = population_optimum(cfg.process, n);
    std::vector<double> risks;
    for (const auto& r : run_trials(cfg.process, prob, n, cfg.trials, cfg.seed, exec)) risks.push_back(r.excess_risk);
    rep.ns.push_back(n);
    rep.medians.push_back(median(risks));
  }
  rep.slope = fit_log_slope(rep.ns, rep.medians);
  return rep;
}

std::vector<LowerTailRow> verify_lower_tail(const ExperimentConfig& cfg, Execution exec) {
  std::vector<LowerTailRow> rows;
  for (std::size_t n : cfg.ns) {
    const RegressionProblem prob = population_optimum(cfg.process, n);
    const BlockPartition partition = cfg.partition.for_n(n);
    LowerTailRow row;
    row.n = n;
    const std::size_t dirs = 10 * prob.covariate_dim();
    const auto h_trials = static_cast<std::size_t>(
        std::clamp(2e7 / static_cast<double>(n * (dirs + prob.covariate_dim())), 1.0, 1000.0));
    row.h2 = estimate_h2(cfg.process, prob, n, h_trials, dirs, stream_seed(cfg.seed, n, kMomentStream), exec);
    row.certificate = lower_tail_certificate(partition, prob.covariate_dim(), std::sqrt(row.h2), cfg.delta,
                                             profile_for(cfg, partition), cfg.constants.c_lower);
    std::vector<char> hit(cfg.trials, 0);
    for_each_index(cfg.trials, exec, [&](std::size_t k) {
      const Trajectory traj = simulate(cfg.process, n, trial_seed(cfg.seed, n, k));
      const Matrix z = traj.xs * prob.sigma_x_inv_sqrt();
      hit[k] = min_eigenvalue(z.transpose() * z / static_cast<double>(n)) >= 0.5;
    });
    row.frequency = static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / static_cast<double>(cfg.trials);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<NoiseWalkRow> verify_noise_walk(const ExperimentConfig& cfg, Execution exec) {
  std::vector<NoiseWalkRow> rows;
  for (std::size_t n : cfg.ns) {
    const RegressionProblem prob = population_optimum(cfg.process, n);
    const BlockPartition partition = cfg.partition.for_n(n);
    NoiseWalkRow row;
    row.n = n;
    row.trials = cfg.trials;
    row.ratio = estimate_r(cfg.process, prob, partition, cfg.n_mc, stream_seed(cfg.seed, n, kRatioStream),
                           cfg.moment_s, exec);
    std::vector<double> norms(cfg.trials);
    for_each_index(cfg.trials, exec, [&](std::size_t k) {
      norms[k] = noise_walk(simulate(cfg.process, n, trial_seed(cfg.seed, n, k)), prob).s_n.norm();
    });
    if (row.ratio.degenerate) {
      row.threshold = 0.0;
      row.budget = 1.0;
      row.exceedance = static_cast<double>(std::count_if(norms.begin(), norms.end(), [](double x) { return x > 0.0; })) /
                       static_cast<double>(cfg.trials);
    } else {
      row.threshold = noise_term_threshold(row.ratio.lambda_odd, row.ratio.lambda_even, partition.odd_size(),
                                           partition.even_size(), row.ratio.r, cfg.noise_eps, cfg.noise_eta,
                                           cfg.delta);
      NoiseTermBudgetInput in;
      in.delta = cfg.delta;
      in.mixing_sum = mixing_sum(profile_for(cfg, partition), partition);
      in.r = row.ratio.r;
      in.eps = cfg.noise_eps;
      in.eta = cfg.noise_eta;
      in.s = cfg.moment_s;
      in.lambda_odd = row.ratio.lambda_odd;
      in.lambda_even = row.ratio.lambda_even;
      in.size_odd = partition.odd_size();
      in.size_even = partition.even_size();
      in.block_moment_odd = row.ratio.block_moment_odd;
      in.block_moment_even = row.ratio.block_moment_even;
      row.budget = noise_term_failure_budget(in);
      const double t = row.threshold;
      row.exceedance = static_cast<double>(std::count_if(norms.begin(), norms.end(), [t](double x) { return x >= t; })) /
                       static_cast<double>(cfg.trials);
    }
    rows.push_back(row);
  }
  return rows;
}

std::optional<std::size_t> stable_from(const std::vector<std::size_t>& lengths, const std::vector<double>& sigma2) {
  if (lengths.size() != sigma2.size() || lengths.empty()) throw ArgumentError("one sigma2 per length is required");
  std::size_t first = lengths.size() - 1;
  for (std::size_t i = lengths.size() - 1; i-- > 0;) {
    const double ratio = sigma2[i] > 0.0 ? sigma2[i + 1] / sigma2[i] : std::numeric_limits<double>::infinity();
    if (!(ratio >= 0.8 && ratio <= 1.25)) break;
    first = i;
  }
  if (first == lengths.size() - 1 && lengths.size() > 1) return std::nullopt;
  return lengths[first];
}

CltReport clt_consistency(const ExperimentConfig& cfg, Execution exec) {
  std::size_t horizon = *std::max_element(cfg.block_lengths.begin(), cfg.block_lengths.end());
  const RegressionProblem prob = population_optimum(cfg.process, horizon);
  const auto cov = clt_variance(cfg.process, prob, cfg.block_lengths, cfg.n_mc, cfg.seed, exec);
  CltReport rep;
  for (std::size_t len : cfg.block_lengths) {
    rep.lengths.push_back(len);
    rep.sigma2.push_back(op_norm_psd(cov.at(len)));
  }
  rep.stable_from = stable_from(rep.lengths, rep.sigma2);
  return rep;
}

}  // namespace mixreg
