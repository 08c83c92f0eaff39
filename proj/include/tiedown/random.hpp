#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tiedown {

/// Random stream used throughout: a 64-bit Mersenne twister. Streams are
/// owned by one caller; parallel code derives independent sub-streams with
/// `split_stream`.
using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic sub-stream `index` of `seed`.
inline Rng split_stream(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = detail::splitmix64(seed);
  const std::uint64_t b = detail::splitmix64(a ^ detail::splitmix64(index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// Uniform variate on the open interval (0,1) from the top 53 bits. Written
/// out instead of std::uniform_real_distribution so that draws are identical
/// across standard library implementations.
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard exponential variate.
inline double exponential(Rng& rng) { return -std::log(uniform_open(rng)); }

}  // namespace tiedown
