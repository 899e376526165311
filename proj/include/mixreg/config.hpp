#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixreg/blocking.hpp"
#include "mixreg/bounds.hpp"
#include "mixreg/process.hpp"

namespace mixreg {

/// How a partition is chosen for each sample size n.
struct PartitionRule {
  enum class Kind { Tau, M, Lengths };
  Kind kind = Kind::Tau;
  std::size_t tau = 1;
  std::size_t m = 1;
  std::vector<std::size_t> lengths;

  /// Tau: m = floor(n / (2 tau)) near-uniform blocks. M: fixed m. Lengths:
  /// the listed lengths, which must sum to n.
  BlockPartition for_n(std::size_t n) const;
};

/// Experiment settings. The INI layout:
///
///   [process]    kind = gaussian_ar | iid_gaussian | block_constant | finite_markov
///                theta, noise_std, warm_start (auto | none | steps)
///                dim, covariance (identity | diagonal list | rows), link, block_len
///                transition, emission_x, emission_y, initial
///   [fit]        window, lag_offset
///   [partition]  rule = tau | m | lengths; tau; m; lengths
///   [experiment] ns, delta, trials, seed, n_mc, moment_s, block_lengths,
///                noise_eps, noise_eta, max_gap
///   [constants]  c1 .. c6, c_lower
///   [output]     dir
///
/// Lists are comma separated; matrix rows are separated by ';'.
struct ExperimentConfig {
  explicit ExperimentConfig(ProcessSpec p) : process(std::move(p)) {}

  ProcessSpec process;
  std::vector<std::size_t> ns{1000};
  PartitionRule partition;
  double delta = 0.1;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t n_mc = 1000;
  double moment_s = 4.0;
  std::vector<std::size_t> block_lengths{1, 2, 4, 8, 16, 32, 64, 128};
  double noise_eps = 1.0;
  double noise_eta = 1.0;
  std::size_t max_gap = 64;
  UniversalConstants constants;
  std::string out_dir = ".";
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Writes the INI form that parse_config reads back.
void write_config(std::ostream& out, const ExperimentConfig& cfg);

/// "1,2;3,4" -> [[1,2],[3,4]]
Matrix parse_matrix(const std::string& text);
std::vector<double> parse_list(const std::string& text);
std::vector<std::size_t> parse_size_list(const std::string& text);

}  // namespace mixreg
