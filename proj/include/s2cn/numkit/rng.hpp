#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace s2cn {

/// Counter-based generator: the k-th draw is splitmix64(seed + (k + 1) * golden).
/// Distributions are computed here rather than by <random> so sequences do not
/// depend on the standard library implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;  // [0, 1)
  double uniform(double lo, double hi) noexcept;
  double normal() noexcept;
  std::size_t below(std::size_t n);  // uniform integer in [0, n)

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Stable sub-seed for a named component.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view component) noexcept;

}  // namespace s2cn
