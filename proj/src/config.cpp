#include "mixreg/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mixreg/csv.hpp"
#include "mixreg/errors.hpp"

namespace mixreg {

namespace pt = boost::property_tree;

namespace {

std::string trimmed(std::string s) {
  boost::algorithm::trim(s);
  return s;
}

std::size_t to_size(double x, const std::string& what) {
  if (!(x >= 0.0) || x != std::floor(x) || x > 1e15) {
    throw ArgumentError(what + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(x);
}

std::optional<std::string> get(const pt::ptree& tree, const std::string& key) {
  if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return trimmed(*v);
  return std::nullopt;
}

double get_double(const pt::ptree& tree, const std::string& key, double fallback) {
  auto v = get(tree, key);
  return v ? parse_double(*v) : fallback;
}

std::size_t get_size(const pt::ptree& tree, const std::string& key, std::size_t fallback) {
  auto v = get(tree, key);
  return v ? to_size(parse_double(*v), key) : fallback;
}

std::string require(const pt::ptree& tree, const std::string& key) {
  auto v = get(tree, key);
  if (!v || v->empty()) throw ArgumentError("config is missing '" + key + "'");
  return *v;
}

Matrix parse_covariance(const std::string& text, std::size_t dim) {
  if (text == "identity") {
    if (dim == 0) throw ArgumentError("process.dim is required for an identity covariance");
    return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  }
  Matrix m = parse_matrix(text);
  if (m.rows() == 1 && m.cols() > 1) return Matrix(m.row(0).transpose().asDiagonal());
  return m;
}

ProcessSpec parse_process(const pt::ptree& tree) {
  const std::string kind_name = require(tree, "process.kind");
  const ProcessKind kind = parse_process_kind(kind_name);
  ProcessSpec spec = [&] {
    switch (kind) {
      case ProcessKind::GaussianAR: {
        const auto theta = parse_list(require(tree, "process.theta"));
        WarmStart warm = WarmStart::automatic();
        if (auto w = get(tree, "process.warm_start")) {
          if (*w == "none") {
            warm = WarmStart::none();
          } else if (*w != "auto") {
            warm = WarmStart::fixed(to_size(parse_double(*w), "process.warm_start"));
          }
        }
        return ProcessSpec::gaussian_ar(Eigen::Map<const Vector>(theta.data(), static_cast<Eigen::Index>(theta.size())),
                                        get_double(tree, "process.noise_std", 1.0),
                                        get_size(tree, "fit.window", 1), get_size(tree, "fit.lag_offset", 1),
                                        warm);
      }
      case ProcessKind::IIDGaussian:
      case ProcessKind::BlockConstant: {
        const std::size_t dim = get_size(tree, "process.dim", 0);
        Matrix cov = parse_covariance(get(tree, "process.covariance").value_or("identity"), dim);
        if (dim != 0 && static_cast<std::size_t>(cov.rows()) != dim) {
          throw ArgumentError("process.covariance does not match process.dim");
        }
        Matrix link = parse_matrix(require(tree, "process.link"));
        const double noise = get_double(tree, "process.noise_std", 1.0);
        if (kind == ProcessKind::IIDGaussian) return ProcessSpec::iid_gaussian(cov, link, noise);
        return ProcessSpec::block_constant(get_size(tree, "process.block_len", 1), cov, link, noise);
      }
      case ProcessKind::FiniteMarkov: {
        std::optional<Vector> initial;
        if (auto init = get(tree, "process.initial")) {
          const auto p = parse_list(*init);
          initial = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
        }
        return ProcessSpec::finite_markov(parse_matrix(require(tree, "process.transition")),
                                          parse_matrix(require(tree, "process.emission_x")),
                                          parse_matrix(require(tree, "process.emission_y")), initial);
      }
    }
    throw ArgumentError("unknown process kind");
  }();
  if (auto id = get(tree, "process.id")) spec.set_id(*id);
  return spec;
}

PartitionRule parse_partition(const pt::ptree& tree) {
  PartitionRule rule;
  const std::string name = get(tree, "partition.rule").value_or("tau");
  if (name == "tau") {
    rule.kind = PartitionRule::Kind::Tau;
    rule.tau = get_size(tree, "partition.tau", 1);
    if (rule.tau == 0) throw ArgumentError("partition.tau must be at least 1");
  } else if (name == "m") {
    rule.kind = PartitionRule::Kind::M;
    rule.m = get_size(tree, "partition.m", 1);
  } else if (name == "lengths") {
    rule.kind = PartitionRule::Kind::Lengths;
    rule.lengths = parse_size_list(require(tree, "partition.lengths"));
  } else {
    throw ArgumentError("partition.rule must be tau, m or lengths");
  }
  return rule;
}

std::string join_doubles(std::span<const double> xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(xs[i]);
  }
  return out;
}

std::string join_sizes(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string format_matrix(const Matrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) out += "; ";
    const Vector row = m.row(r).transpose();
    out += join_doubles({row.data(), static_cast<std::size_t>(row.size())});
  }
  return out;
}

}  // namespace

BlockPartition PartitionRule::for_n(std::size_t n) const {
  switch (kind) {
    case Kind::Tau: {
      const std::size_t m_for_n = n / (2 * tau);
      if (m_for_n == 0) throw ArgumentError("n = " + std::to_string(n) + " is shorter than 2 tau");
      return BlockPartition::uniform(n, m_for_n);
    }
    case Kind::M: return BlockPartition::uniform(n, m);
    case Kind::Lengths: {
      std::size_t total = 0;
      for (auto l : lengths) total += l;
      if (total != n) throw ArgumentError("partition.lengths must sum to n = " + std::to_string(n));
      return BlockPartition::from_lengths(lengths);
    }
  }
  throw ArgumentError("unknown partition rule");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
  std::vector<double> out;
  for (auto& p : parts) {
    const std::string t = trimmed(p);
    if (t.empty()) throw ArgumentError("empty entry in list '" + text + "'");
    out.push_back(parse_double(t));
  }
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (double x : parse_list(text)) out.push_back(to_size(x, "list entry"));
  return out;
}

Matrix parse_matrix(const std::string& text) {
  std::vector<std::string> rows;
  boost::algorithm::split(rows, text, boost::algorithm::is_any_of(";"));
  std::vector<std::vector<double>> values;
  for (auto& r : rows) values.push_back(parse_list(trimmed(r)));
  const std::size_t cols = values.front().size();
  Matrix m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (values[r].size() != cols) throw ArgumentError("matrix rows differ in length: '" + text + "'");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r][c];
    }
  }
  return m;
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg(parse_process(tree));
  if (auto ns = get(tree, "experiment.ns")) cfg.ns = parse_size_list(*ns);
  cfg.partition = parse_partition(tree);
  cfg.delta = get_double(tree, "experiment.delta", cfg.delta);
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ArgumentError("experiment.delta must lie in (0, 1)");
  cfg.trials = get_size(tree, "experiment.trials", cfg.trials);
  if (auto seed = get(tree, "experiment.seed")) {
    auto [ptr, ec] = std::from_chars(seed->data(), seed->data() + seed->size(), cfg.seed);
    if (ec != std::errc{} || ptr != seed->data() + seed->size()) {
      throw ArgumentError("experiment.seed must be an unsigned 64-bit integer");
    }
  }
  cfg.n_mc = get_size(tree, "experiment.n_mc", cfg.n_mc);
  cfg.moment_s = get_double(tree, "experiment.moment_s", cfg.moment_s);
  if (auto bl = get(tree, "experiment.block_lengths")) cfg.block_lengths = parse_size_list(*bl);
  cfg.noise_eps = get_double(tree, "experiment.noise_eps", cfg.noise_eps);
  cfg.noise_eta = get_double(tree, "experiment.noise_eta", cfg.noise_eta);
  cfg.max_gap = get_size(tree, "experiment.max_gap", cfg.max_gap);

  auto& c = cfg.constants;
  c.c1 = get_double(tree, "constants.c1", c.c1);
  c.c2 = get_double(tree, "constants.c2", c.c2);
  c.c3 = get_double(tree, "constants.c3", c.c3);
  c.c4 = get_double(tree, "constants.c4", c.c4);
  c.c5 = get_double(tree, "constants.c5", c.c5);
  c.c6 = get_double(tree, "constants.c6", c.c6);
  c.c_lower = get_double(tree, "constants.c_lower", c.c_lower);
  c.validate();
  cfg.out_dir = get(tree, "output.dir").value_or(cfg.out_dir);
  if (cfg.ns.empty()) throw ArgumentError("experiment.ns must list at least one n");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  const ProcessSpec& p = cfg.process;
  out << "[process]\n";
  out << "kind = " << to_string(p.kind()) << "\n";
  out << "id = " << p.id() << "\n";
  switch (p.kind()) {
    case ProcessKind::GaussianAR: {
      out << "theta = " << join_doubles({p.ar_coeffs().data(), p.ar_order()}) << "\n";
      out << "noise_std = " << format_double(p.noise_std()) << "\n";
      const auto& w = p.warm_start();
      out << "warm_start = "
          << (w.mode == WarmStart::Mode::Auto ? "auto"
              : w.mode == WarmStart::Mode::None ? "none"
                                                : std::to_string(w.steps))
          << "\n";
      break;
    }
    case ProcessKind::BlockConstant:
      out << "block_len = " << p.block_len() << "\n";
      [[fallthrough]];
    case ProcessKind::IIDGaussian:
      out << "dim = " << p.covariate_dim() << "\n";
      out << "covariance = " << format_matrix(p.covariate_cov()) << "\n";
      out << "link = " << format_matrix(p.link()) << "\n";
      out << "noise_std = " << format_double(p.noise_std()) << "\n";
      break;
    case ProcessKind::FiniteMarkov:
      out << "transition = " << format_matrix(p.transition()) << "\n";
      out << "emission_x = " << format_matrix(p.emission_x()) << "\n";
      out << "emission_y = " << format_matrix(p.emission_y()) << "\n";
      out << "initial = " << join_doubles({p.initial_law().data(), p.state_count()}) << "\n";
      break;
  }
  if (p.kind() == ProcessKind::GaussianAR) {
    out << "\n[fit]\nwindow = " << p.window() << "\nlag_offset = " << p.lag_offset() << "\n";
  }
  out << "\n[partition]\n";
  switch (cfg.partition.kind) {
    case PartitionRule::Kind::Tau: out << "rule = tau\ntau = " << cfg.partition.tau << "\n"; break;
    case PartitionRule::Kind::M: out << "rule = m\nm = " << cfg.partition.m << "\n"; break;
    case PartitionRule::Kind::Lengths:
      out << "rule = lengths\nlengths = " << join_sizes(cfg.partition.lengths) << "\n";
      break;
  }
  out << "\n[experiment]\n";
  out << "ns = " << join_sizes(cfg.ns) << "\n";
  out << "delta = " << format_double(cfg.delta) << "\n";
  out << "trials = " << cfg.trials << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "n_mc = " << cfg.n_mc << "\n";
  out << "moment_s = " << format_double(cfg.moment_s) << "\n";
  out << "block_lengths = " << join_sizes(cfg.block_lengths) << "\n";
  out << "noise_eps = " << format_double(cfg.noise_eps) << "\n";
  out << "noise_eta = " << format_double(cfg.noise_eta) << "\n";
  out << "max_gap = " << cfg.max_gap << "\n";
  const auto& c = cfg.constants;
  out << "\n[constants]\n";
  out << "c1 = " << format_double(c.c1) << "\nc2 = " << format_double(c.c2) << "\nc3 = " << format_double(c.c3)
      << "\nc4 = " << format_double(c.c4) << "\nc5 = " << format_double(c.c5) << "\nc6 = " << format_double(c.c6)
      << "\nc_lower = " << format_double(c.c_lower) << "\n";
  out << "\n[output]\ndir = " << cfg.out_dir << "\n";
}

}  // namespace mixreg
