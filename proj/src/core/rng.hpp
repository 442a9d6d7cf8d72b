#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace oim {

// SplitMix64 finalizer. Used to derive independent stream seeds and as a
// counter-based uniform source for live-edge worlds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  return mix64(mix64(parent) ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

// FNV-1a, so string tags ("cascade", "oracle") can name sub-streams.
constexpr std::uint64_t tag_of(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr double bits_to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform [0,1) value that depends only on (key, counter).
constexpr double hashed_uniform(std::uint64_t key, std::uint64_t counter) {
  return bits_to_unit(mix64(key ^ mix64(counter)));
}

/// A seeded random stream. Streams for parallel work are created up front
/// with `Rng::stream(parent, tag)` so results do not depend on scheduling.
class Rng {
 public:
  using Engine = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  static Rng stream(std::uint64_t parent, std::uint64_t tag) {
    return Rng(derive_seed(parent, tag));
  }

  std::uint64_t seed() const { return seed_; }
  Engine& engine() { return engine_; }

  std::uint64_t next() { return engine_(); }

  double uniform() { return bits_to_unit(engine_()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  double normal();
  double gamma(double shape);
  double beta(double a, double b);

 private:
  std::uint64_t seed_;
  Engine engine_;
};

}  // namespace oim
