#include "semproc/rng.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <cmath>

namespace semproc {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::uint64_t label_hash(const SeedLabel& label) noexcept {
  if (const auto* v = std::get_if<std::uint64_t>(&label)) return *v;
  return splitmix64(fnv1a64(std::get<std::string>(label)) ^ 0x5bd1e9955bd1e995ULL);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, const std::vector<SeedLabel>& path) noexcept {
  std::uint64_t s = root;
  for (const auto& label : path) s = splitmix64(s ^ splitmix64(label_hash(label) + 0x9e3779b97f4a7c15ULL));
  return s;
}

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<SeedLabel> path) noexcept {
  return derive_seed(root, std::vector<SeedLabel>(path));
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  boost::random::uniform_int_distribution<std::int64_t> dist(lo, hi);
  return dist(engine_);
}

double Rng::normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double Rng::exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

}  // namespace semproc
