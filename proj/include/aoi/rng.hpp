#pragma once

// Counter-style random streams built on the splitmix64 mixer.  Streams are
// cheap value types; substream() derives statistically independent streams
// from a seed plus integer keys, so every (replication, source, purpose)
// triple gets its own reproducible sequence no matter how work is scheduled.

#include <cstdint>
#include <cmath>

namespace aoi {

namespace detail {

inline std::uint64_t splitmix_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t h, std::uint64_t key) {
  h += 0x9e3779b97f4a7c15ULL * (key + 0x632be59bd9b4e019ULL);
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

}  // namespace detail

struct RngStream {
  std::uint64_t state = 0;

  std::uint64_t next_u64() { return detail::splitmix_next(state); }

  // Uniform on the open interval (0,1): never 0, never 1, so logs and
  // inverse CDFs are always finite.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second coordinate is discarded to
  // keep the stream stateless beyond its counter.
  double next_normal() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
};

// Derives the stream identified by (seed, key1, key2, key3).
inline RngStream substream(std::uint64_t seed, std::uint64_t key1,
                           std::uint64_t key2 = 0, std::uint64_t key3 = 0) {
  std::uint64_t h = detail::mix_key(seed, key1);
  h = detail::mix_key(h, key2);
  h = detail::mix_key(h, key3);
  return RngStream{h};
}

}  // namespace aoi
