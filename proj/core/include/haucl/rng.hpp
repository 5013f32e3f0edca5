#pragma once

#include <cstdint>
#include <string_view>

namespace haucl {

/// Deterministic pseudo-random stream (splitmix64). One root seed is split
/// into independent per-purpose streams so that adding draws to one part of
/// the pipeline never shifts the draws of another. All floating-point
/// sampling is implemented on top of raw 64-bit words, so a given seed
/// produces bit-identical sequences on every platform / standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  /// Derive a stream for a named purpose ("init", "dropout", "delta", ...)
  /// from a root seed.
  static RngStream for_purpose(std::uint64_t root_seed, std::string_view purpose);

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01();

  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double normal();

  /// Standard Gumbel, -log(-log(u)) with u clamped to [eps, 1-eps].
  double gumbel(double eps = 1e-10);

 private:
  std::uint64_t state_;
};

}  // namespace haucl
