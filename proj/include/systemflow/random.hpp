#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace systemflow {

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a(std::string_view text);

/// SplitMix64 finaliser applied to `x`.
std::uint64_t splitmix64(std::uint64_t x);

/// Seeded stream of variates. The engine is std::mt19937_64, whose output
/// sequence the C++ standard fixes; uniforms use the top 53 bits and normals
/// use Box-Muller, so results depend only on the seed and on libm's log/cos/sin.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0;
  bool has_spare_ = false;
};

/// Independent stream for (seed, tag): engine seeded with splitmix64(seed ^ fnv1a(tag)).
RandomStream substream(std::uint64_t seed, std::string_view tag);

}  // namespace systemflow
