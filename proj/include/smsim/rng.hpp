#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace smsim {

// splitmix64 step; also used standalone as a mixing finalizer
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derive an independent generator for a named substream of a master seed.
// Folding the keys through splitmix64 keeps streams decorrelated no matter
// how (seed, keys) collide numerically.
inline std::mt19937_64 substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  for (std::uint64_t k : keys) {
    s ^= k;
    h ^= splitmix64(s);
    s += h;
  }
  return std::mt19937_64(h);
}

// snr values keyed by micro-dB so that equal grid points share a stream
inline std::uint64_t snr_key(double snr_db) {
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(snr_db * 1e6 + (snr_db >= 0 ? 0.5 : -0.5)));
}

// Minimal counter generator for structural permutations that must never
// change across standard library versions.
struct Splitmix {
  std::uint64_t state;
  explicit Splitmix(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() { return splitmix64(state); }
  // unbiased-enough index draw for permutation shuffles
  std::size_t below(std::size_t bound) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }
};

}  // namespace smsim
