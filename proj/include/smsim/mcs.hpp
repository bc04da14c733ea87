#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace smsim {

enum class Modulation { Bpsk, Mfsk };

inline constexpr std::array<int, 6> kMfskSizes{2, 4, 8, 16, 64, 256};

inline constexpr int ilog2(int v) {
  int k = 0;
  while ((1 << k) < v) ++k;
  return k;
}

// One modulation-and-coding scheme: BPSK, or MFSK with subset size m.
// All schemes share the rate-1/2 code, so the MCS is fully identified here.
struct McsId {
  Modulation kind = Modulation::Bpsk;
  int m = 0;

  static McsId bpsk() { return {Modulation::Bpsk, 0}; }

  static McsId mfsk(int m) {
    for (int s : kMfskSizes)
      if (s == m) return {Modulation::Mfsk, m};
    throw std::invalid_argument("mfsk subset size must be one of {2,4,8,16,64,256}, got " +
                                std::to_string(m));
  }

  bool is_mfsk() const { return kind == Modulation::Mfsk; }
  int bits_per_subset() const { return is_mfsk() ? ilog2(m) : 1; }

  std::string name() const {
    return is_mfsk() ? "mfsk" + std::to_string(m) : std::string("bpsk");
  }

  // stable key for rng substream derivation and map ordering
  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(kind) << 32) | static_cast<std::uint32_t>(m);
  }

  friend bool operator==(const McsId&, const McsId&) = default;
  friend bool operator<(const McsId& a, const McsId& b) { return a.key() < b.key(); }
};

McsId mcs_from_name(std::string_view name);

inline constexpr double kBpskRateBps = 1.792e6;

// MFSK carries log2(m) bits on m subcarriers, so its rate is the BPSK rate
// scaled by log2(m)/m.
inline double mcs_rate_bps(const McsId& mcs) {
  if (!mcs.is_mfsk()) return kBpskRateBps;
  return kBpskRateBps * mcs.bits_per_subset() / mcs.m;
}

// every MCS, most robust MFSK first, BPSK last
std::array<McsId, 7> all_mcs();

}  // namespace smsim
