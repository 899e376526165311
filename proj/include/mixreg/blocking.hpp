#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mixreg/linalg.hpp"
#include "mixreg/mixing.hpp"
#include "mixreg/process.hpp"

namespace mixreg {

/// Consecutive partition a_1 .. a_{2m} of the sample indices [0, n).
///
/// Block indices here are 0-based, so the odd union O (blocks a_1, a_3, ...)
/// is made of the even 0-based indices.
class BlockPartition {
 public:
  /// 2m near-equal blocks; the first n mod 2m blocks get the extra sample.
  static BlockPartition uniform(std::size_t n, std::size_t m);
  /// Blocks of exactly the given lengths (an even number of them, all >= 1).
  static BlockPartition from_lengths(std::vector<std::size_t> lengths);

  std::size_t n() const noexcept { return starts_.back(); }
  std::size_t m() const noexcept { return lengths_.size() / 2; }
  std::size_t block_count() const noexcept { return lengths_.size(); }

  std::size_t begin(std::size_t i) const { return starts_.at(i); }
  std::size_t end(std::size_t i) const { return starts_.at(i + 1); }
  std::size_t length(std::size_t i) const { return lengths_.at(i); }
  const std::vector<std::size_t>& lengths() const noexcept { return lengths_; }

  /// Block containing sample j.
  std::size_t block_of(std::size_t j) const;

  static bool in_odd_union(std::size_t i) noexcept { return i % 2 == 0; }
  std::size_t odd_size() const noexcept { return odd_size_; }
  std::size_t even_size() const noexcept { return n() - odd_size_; }

  std::size_t a_max() const noexcept { return a_max_; }
  std::size_t a_min() const noexcept { return a_min_; }

 private:
  explicit BlockPartition(std::vector<std::size_t> lengths);

  std::vector<std::size_t> lengths_;
  std::vector<std::size_t> starts_;
  std::size_t odd_size_ = 0;
  std::size_t a_max_ = 0;
  std::size_t a_min_ = 0;
};

inline BlockPartition make_partition(std::size_t n, std::size_t m) { return BlockPartition::uniform(n, m); }

/// Row i of the result is the sum of rows a_i of `values` (n x d).
Matrix block_sums(const Matrix& values, const BlockPartition& partition);

/// Blockwise decoupled copy: block i is an independent draw from the law of
/// the samples in a_i (seeded with derive_seed(seed, i)), blocks are
/// concatenated. Exact for every supported kind; the zero-initialized AR
/// re-simulates each block's prefix, which costs O(n^2 / m).
Trajectory decoupled_resample(const ProcessSpec& spec, const BlockPartition& partition,
                              std::uint64_t seed);

enum class DecouplingForm {
  Proposition,  // interior blocks 2 .. 2m-1
  Corollary,    // all blocks 1 .. 2m
};

/// Failure-probability budget sum of beta(|a_i|) over the blocks of `form`.
double decoupling_gap_bound(const MixingProfile& profile, const BlockPartition& partition,
                            DecouplingForm form = DecouplingForm::Proposition);

}  // namespace mixreg
