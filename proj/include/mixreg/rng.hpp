#pragma once

#include <cstdint>
#include <span>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace mixreg {

/// SplitMix64: a counter-based 64-bit generator. The i-th output is a fixed
/// bijective mix of `seed + (i + 1) * gamma`, so a stream is fully described
/// by its seed and reseeding costs nothing.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    state_ += kGamma;
    return mix(state_);
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed of sub-stream `stream` of `base`. Distinct (base, stream) pairs give
/// statistically independent SplitMix64 streams; used to give every trial and
/// every block its own generator independent of scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  return SplitMix64::mix(SplitMix64::mix(base) ^ SplitMix64::mix(stream + SplitMix64::kGamma));
}

/// Per-stream sampler: uniform, standard normal and categorical draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : engine_(seed) {}

  double gaussian() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// Index drawn from a cumulative distribution (last entry ~ 1).
  std::size_t categorical(std::span<const double> cdf);

  SplitMix64& engine() noexcept { return engine_; }

 private:
  SplitMix64 engine_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
  boost::random::uniform_01<double> uniform_;
};

}  // namespace mixreg
