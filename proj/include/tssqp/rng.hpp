#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tssqp {

/// SplitMix64 finalizer. Used to turn structured keys into well-mixed seeds.
std::uint64_t mix64(std::uint64_t z);

/// Seed of the independent stream for `index` under `base_seed`.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

/// FNV-1a over raw bytes; stable across platforms and releases.
class StableHash {
 public:
  StableHash& add(std::string_view bytes);
  StableHash& add(std::uint64_t value);
  StableHash& add(double value);
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

/// Single-owner random stream. Uniforms take the top 53 bits of a
/// mt19937_64 draw; normals use the Box-Muller transform and cache the
/// second variate, so a stream is reproducible across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace tssqp
