#include "mixreg/rng.hpp"

#include <algorithm>

namespace mixreg {

std::size_t Rng::categorical(std::span<const double> cdf) {
  const double u = uniform();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) return cdf.size() - 1;
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace mixreg
