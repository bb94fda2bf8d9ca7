#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace magnet {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent substream key from a root seed and a coordinate.
// Streams are addressed by (root, tag, index) so any unit of work can
// reconstruct its randomness without touching shared state.
constexpr std::uint64_t derive_key(std::uint64_t root, std::uint64_t tag,
                                   std::uint64_t index = 0) noexcept {
  return mix64(mix64(root ^ mix64(tag)) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

namespace stream_tag {
inline constexpr std::uint64_t kAttributes = 0x61747472ULL;     // "attr"
inline constexpr std::uint64_t kNaiveRow = 0x6e616976ULL;       // "naiv"
inline constexpr std::uint64_t kBucketPair = 0x62636b74ULL;     // "bckt"
inline constexpr std::uint64_t kSources = 0x73726373ULL;        // "srcs"
inline constexpr std::uint64_t kSpectral = 0x73766473ULL;       // "svds"
}  // namespace stream_tag

// Counter-based generator: a Weyl sequence passed through the SplitMix64
// finalizer. Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Stream(std::uint64_t key) noexcept : state_(key) {}
  Stream(std::uint64_t root, std::uint64_t tag, std::uint64_t index = 0) noexcept
      : state_(derive_key(root, tag, index)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by multiply-shift (bound > 0).
  std::uint64_t below(std::uint64_t bound) noexcept {
    __extension__ using Wide = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<Wide>((*this)()) * bound) >> 64);
  }

  // Number of failures before the first success of a Bernoulli(p) sequence,
  // drawn exactly by inversion. Returns max() when p underflows to zero.
  std::uint64_t geometric_skip(double p) noexcept {
    if (p >= 1.0) return 0;
    if (!(p > 0.0)) return max();
    const double skip = std::floor(std::log(uniform()) / std::log1p(-p));
    if (skip >= 0x1.0p63) return max();
    return static_cast<std::uint64_t>(skip);
  }

 private:
  std::uint64_t state_;
};

}  // namespace magnet
