#include "mixreg/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "mixreg/config.hpp"
#include "mixreg/csv.hpp"
#include "mixreg/errors.hpp"
#include "mixreg/experiment.hpp"
#include "mixreg/mixing.hpp"

namespace mixreg {

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
  std::string format = "text";
  bool serial = false;

  Execution exec() const { return serial ? Execution::Serial : Execution::Parallel; }
  bool csv() const { return format == "csv"; }
};

void add_common(CLI::App* sub, CommonOptions& opt, bool needs_config = true) {
  auto* c = sub->add_option("--config", opt.config, "experiment configuration (INI)");
  if (needs_config) c->required();
  sub->add_option("--seed", opt.seed, "base seed, overrides the config");
  sub->add_option("--trials", opt.trials, "number of trials, overrides the config");
  sub->add_option("--out", opt.out, "output directory, overrides the config");
  sub->add_option("--format", opt.format, "stdout format")->check(CLI::IsMember({"csv", "text"}));
  sub->add_flag("--serial", opt.serial, "use the serial reference kernels");
}

ExperimentConfig load(const CommonOptions& opt) {
  ExperimentConfig cfg = load_config(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.trials) cfg.trials = *opt.trials;
  if (opt.out) cfg.out_dir = *opt.out;
  return cfg;
}

std::ofstream open_file(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
  if (!f) throw Error("cannot write " + (std::filesystem::path(dir) / name).string());
  return f;
}

// Two-state symmetric chain from "q=0.3".
Matrix markov_from_flag(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || text.substr(0, eq) != "q") {
    throw ArgumentError("--markov expects q=<flip probability>");
  }
  const double q = parse_double(text.substr(eq + 1));
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("--markov q must lie in [0, 1]");
  Matrix p(2, 2);
  p << 1.0 - q, q, q, 1.0 - q;
  return p;
}

void run_simulate(const CommonOptions& opt, std::optional<std::size_t> n_flag, std::ostream& out) {
  const ExperimentConfig cfg = load(opt);
  const std::size_t n = n_flag ? *n_flag : cfg.ns.front();
  const Trajectory traj = simulate(cfg.process, n, cfg.seed);
  if (opt.out) {
    auto f = open_file(*opt.out, "trajectory.csv");
    write_trajectory_csv(f, traj);
  } else {
    write_trajectory_csv(out, traj);
  }
}

void run_mixing(const CommonOptions& opt, const std::string& markov, std::optional<std::size_t> max_gap,
                std::optional<std::size_t> horizon, std::ostream& out) {
  std::optional<MixingProfile> profile;
  if (!markov.empty()) {
    const Matrix p = markov_from_flag(markov);
    const std::size_t gaps = max_gap.value_or(64);
    std::map<std::size_t, double> coeffs;
    for (std::size_t i = 1; i <= gaps; ++i) coeffs[i] = beta_markov_exact(p, i);
    profile.emplace(MixingMethod::ExactMarkov, std::move(coeffs));
  } else if (!opt.config.empty()) {
    const ExperimentConfig cfg = load(opt);
    profile = profile_for_spec(cfg.process, max_gap.value_or(cfg.max_gap), horizon.value_or(cfg.ns.front()));
  } else {
    throw ArgumentError("mixing needs --config or --markov");
  }
  if (opt.out) {
    auto f = open_file(*opt.out, "mixing.csv");
    profile->write_csv(f);
  } else {
    profile->write_csv(out);
  }
}

void print_report(const CommonOptions& opt, const BoundReport& report, std::ostream& out) {
  if (opt.csv()) {
    CsvWriter(out).header(BoundReport::csv_header());
    report.write_csv_row(out);
  } else {
    report.write_text(out);
  }
}

void run_bound(const CommonOptions& opt, std::optional<std::size_t> n_flag, bool corollary, std::ostream& out) {
  const ExperimentConfig cfg = load(opt);
  const std::size_t n = n_flag ? *n_flag : cfg.ns.front();
  const BoundEvaluation eval = evaluate_bound(cfg, n, opt.exec());
  print_report(opt, eval.report, out);
  if (corollary) {
    if (!opt.csv()) out << '\n';
    print_report(opt, evaluate_corollary(cfg, eval), out);
  }
}

void run_coverage_cmd(const CommonOptions& opt, std::ostream& out) {
  const ExperimentConfig cfg = load(opt);
  const auto reports = run_coverage(cfg, opt.exec());
  write_coverage_outputs(cfg.out_dir, reports);
  if (opt.csv()) {
    CsvWriter csv(out);
    csv.header({"n", "bound", "quantile", "coverage", "burnin", "degenerate"});
    for (const auto& r : reports) csv.row(r.n, r.bound, r.quantile, r.coverage, r.report.burnin_holds(), r.degenerate);
    return;
  }
  for (const auto& r : reports) {
    out << "n=" << r.n << "  bound=" << format_double(r.bound) << "  quantile=" << format_double(r.quantile)
        << "  coverage=" << format_double(r.coverage) << "  burn-in " << (r.report.burnin_holds() ? "holds" : "fails")
        << "  degenerate=" << r.degenerate << '\n';
  }
}

void run_lower_tail(const CommonOptions& opt, std::ostream& out) {
  const ExperimentConfig cfg = load(opt);
  const auto rows = verify_lower_tail(cfg, opt.exec());
  auto f = open_file(cfg.out_dir, "lower_tail.csv");
  for (std::ostream* s : {static_cast<std::ostream*>(&f), opt.csv() ? &out : nullptr}) {
    if (!s) continue;
    CsvWriter csv(*s);
    csv.header({"n", "frequency", "target", "h2", "certified"});
    for (const auto& r : rows) csv.row(r.n, r.frequency, 1.0 - cfg.delta, r.h2, r.certificate.certified);
  }
  if (opt.csv()) return;
  for (const auto& r : rows) {
    out << "n=" << r.n << "  frequency=" << format_double(r.frequency) << "  target=" << format_double(1.0 - cfg.delta)
        << "  h2=" << format_double(r.h2) << "  certificate " << (r.certificate.certified ? "passes" : "fails")
        << '\n';
  }
}

void run_noise_walk(const CommonOptions& opt, std::ostream& out) {
  const ExperimentConfig cfg = load(opt);
  const auto rows = verify_noise_walk(cfg, opt.exec());
  auto f = open_file(cfg.out_dir, "noise_walk.csv");
  for (std::ostream* s : {static_cast<std::ostream*>(&f), opt.csv() ? &out : nullptr}) {
    if (!s) continue;
    CsvWriter csv(*s);
    csv.header({"n", "r", "lambda_odd", "lambda_even", "threshold", "budget", "exceedance", "trials"});
    for (const auto& r : rows) {
      csv.row(r.n, r.ratio.r, r.ratio.lambda_odd, r.ratio.lambda_even, r.threshold, r.budget, r.exceedance, r.trials);
    }
  }
  if (opt.csv()) return;
  for (const auto& r : rows) {
    out << "n=" << r.n << "  r=" << format_double(r.ratio.r) << "  threshold=" << format_double(r.threshold)
        << "  exceedance=" << format_double(r.exceedance) << "  budget=" << format_double(r.budget) << '\n';
  }
}

void run_clt(const CommonOptions& opt, std::ostream& out) {
  const ExperimentConfig cfg = load(opt);
  const CltReport rep = clt_consistency(cfg, opt.exec());
  auto f = open_file(cfg.out_dir, "clt.csv");
  for (std::ostream* s : {static_cast<std::ostream*>(&f), opt.csv() ? &out : nullptr}) {
    if (!s) continue;
    CsvWriter csv(*s);
    csv.header({"block_length", "sigma2"});
    for (std::size_t i = 0; i < rep.lengths.size(); ++i) csv.row(rep.lengths[i], rep.sigma2[i]);
  }
  if (opt.csv()) return;
  for (std::size_t i = 0; i < rep.lengths.size(); ++i) {
    out << "L=" << rep.lengths[i] << "  sigma2=" << format_double(rep.sigma2[i]) << '\n';
  }
  if (rep.stable_from) {
    out << "stable from block length " << *rep.stable_from << '\n';
  } else {
    out << "no stabilization within the sweep\n";
  }
}

void run_slope(const CommonOptions& opt, std::ostream& out) {
  const ExperimentConfig cfg = load(opt);
  const SlopeReport rep = rate_slope(cfg, opt.exec());
  auto f = open_file(cfg.out_dir, "slope.csv");
  for (std::ostream* s : {static_cast<std::ostream*>(&f), opt.csv() ? &out : nullptr}) {
    if (!s) continue;
    CsvWriter csv(*s);
    csv.header({"n", "median_excess_risk"});
    for (std::size_t i = 0; i < rep.ns.size(); ++i) csv.row(rep.ns[i], rep.medians[i]);
  }
  if (opt.csv()) return;
  for (std::size_t i = 0; i < rep.ns.size(); ++i) {
    out << "n=" << rep.ns[i] << "  median=" << format_double(rep.medians[i]) << '\n';
  }
  out << "slope " << format_double(rep.slope) << '\n';
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"mixreg: least squares on dependent data", "mixreg"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::optional<std::size_t> n_flag;
  std::string markov;
  std::optional<std::size_t> max_gap;
  std::optional<std::size_t> horizon;
  bool corollary = false;

  auto* sim = app.add_subcommand("simulate", "emit a trajectory as CSV");
  add_common(sim, opt);
  sim->add_option("--n", n_flag, "sample size (default: first of experiment.ns)");

  auto* mix = app.add_subcommand("mixing", "emit a mixing profile as CSV");
  add_common(mix, opt, false);
  mix->add_option("--markov", markov, "two-state symmetric chain, e.g. q=0.3");
  mix->add_option("--max-gap", max_gap, "largest gap");
  mix->add_option("--horizon", horizon, "trajectory length for time-inhomogeneous bounds");

  auto* bnd = app.add_subcommand("bound", "evaluate the excess-risk bound and its burn-in conditions");
  add_common(bnd, opt);
  bnd->add_option("--n", n_flag, "sample size (default: first of experiment.ns)");
  bnd->add_flag("--corollary", corollary, "also evaluate the one-dimensional stationary form");

  auto* cov = app.add_subcommand("coverage", "Monte Carlo coverage of the bound");
  add_common(cov, opt);
  auto* low = app.add_subcommand("lower-tail", "frequency of the lower uniform law event");
  add_common(low, opt);
  auto* nw = app.add_subcommand("noise-walk", "noise term threshold exceedance");
  add_common(nw, opt);
  auto* clt = app.add_subcommand("clt", "block variance sweep");
  add_common(clt, opt);
  auto* slp = app.add_subcommand("slope", "log-log slope of the median excess risk");
  add_common(slp, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*sim) run_simulate(opt, n_flag, out);
    else if (*mix) run_mixing(opt, markov, max_gap, horizon, out);
    else if (*bnd) run_bound(opt, n_flag, corollary, out);
    else if (*cov) run_coverage_cmd(opt, out);
    else if (*low) run_lower_tail(opt, out);
    else if (*nw) run_noise_walk(opt, out);
    else if (*clt) run_clt(opt, out);
    else if (*slp) run_slope(opt, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace mixreg
