#include "mixreg/blocking.hpp"

#include <algorithm>

#include "mixreg/errors.hpp"
#include "mixreg/rng.hpp"

namespace mixreg {

BlockPartition::BlockPartition(std::vector<std::size_t> lengths) : lengths_(std::move(lengths)) {
  if (lengths_.empty() || lengths_.size() % 2 != 0) {
    throw ArgumentError("a partition needs an even, positive number of blocks");
  }
  starts_.assign(lengths_.size() + 1, 0);
  for (std::size_t i = 0; i < lengths_.size(); ++i) {
    if (lengths_[i] == 0) throw ArgumentError("partition blocks must be non-empty");
    starts_[i + 1] = starts_[i] + lengths_[i];
    if (in_odd_union(i)) odd_size_ += lengths_[i];
  }
  a_max_ = *std::max_element(lengths_.begin(), lengths_.end());
  a_min_ = *std::min_element(lengths_.begin(), lengths_.end());
}

BlockPartition BlockPartition::uniform(std::size_t n, std::size_t m) {
  if (m == 0 || 2 * m > n) {
    throw ArgumentError("partition needs 1 <= 2m <= n (n = " + std::to_string(n) +
                        ", m = " + std::to_string(m) + ")");
  }
  const std::size_t blocks = 2 * m;
  std::vector<std::size_t> lengths(blocks, n / blocks);
  for (std::size_t i = 0; i < n % blocks; ++i) ++lengths[i];
  return BlockPartition(std::move(lengths));
}

BlockPartition BlockPartition::from_lengths(std::vector<std::size_t> lengths) {
  return BlockPartition(std::move(lengths));
}

std::size_t BlockPartition::block_of(std::size_t j) const {
  if (j >= n()) throw ArgumentError("sample index outside the partition");
  auto it = std::upper_bound(starts_.begin(), starts_.end(), j);
  return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

Matrix block_sums(const Matrix& values, const BlockPartition& partition) {
  if (static_cast<std::size_t>(values.rows()) != partition.n()) {
    throw ArgumentError("block_sums: " + std::to_string(values.rows()) + " rows for a partition of " +
                        std::to_string(partition.n()));
  }
  Matrix sums(static_cast<Eigen::Index>(partition.block_count()), values.cols());
  for (std::size_t i = 0; i < partition.block_count(); ++i) {
    sums.row(static_cast<Eigen::Index>(i)) =
        values
            .middleRows(static_cast<Eigen::Index>(partition.begin(i)),
                        static_cast<Eigen::Index>(partition.length(i)))
            .colwise()
            .sum();
  }
  return sums;
}

Trajectory decoupled_resample(const ProcessSpec& spec, const BlockPartition& partition,
                              std::uint64_t seed) {
  Trajectory out;
  out.seed = seed;
  out.spec_id = spec.id();
  const auto n = static_cast<Eigen::Index>(partition.n());
  out.xs.resize(n, static_cast<Eigen::Index>(spec.covariate_dim()));
  out.ys.resize(n, static_cast<Eigen::Index>(spec.target_dim()));
  const bool markov = spec.kind() == ProcessKind::FiniteMarkov;
  if (markov) out.states.resize(partition.n());
  for (std::size_t i = 0; i < partition.block_count(); ++i) {
    const Trajectory block =
        simulate_window(spec, partition.begin(i), partition.length(i), derive_seed(seed, i));
    const auto b = static_cast<Eigen::Index>(partition.begin(i));
    const auto len = static_cast<Eigen::Index>(partition.length(i));
    out.xs.middleRows(b, len) = block.xs;
    out.ys.middleRows(b, len) = block.ys;
    if (markov) std::copy(block.states.begin(), block.states.end(), out.states.begin() + b);
  }
  return out;
}

double decoupling_gap_bound(const MixingProfile& profile, const BlockPartition& partition,
                            DecouplingForm form) {
  if (form == DecouplingForm::Proposition) return mixing_sum(profile, partition);
  double sum = 0.0;
  for (std::size_t i = 0; i < partition.block_count(); ++i) sum += profile.at(partition.length(i));
  return sum;
}

}  // namespace mixreg
