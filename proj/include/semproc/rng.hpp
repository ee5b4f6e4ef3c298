#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace semproc {

using SeedLabel = std::variant<std::uint64_t, std::string>;

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view s) noexcept;

// Seed derivation along a path of labels. derive_seed(s, {}) == s.
// Each step: s <- splitmix64(s ^ splitmix64(h + golden)), with h the label
// itself (integers) or its FNV-1a hash (strings, tagged to differ from ints).
std::uint64_t derive_seed(std::uint64_t root, const std::vector<SeedLabel>& path) noexcept;
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<SeedLabel> path) noexcept;

// mt19937_64 stream with platform-stable variates.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // 53-bit uniform in [0,1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal();
  double exponential(double rate);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace semproc
