#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "smsim/interleaver.hpp"
#include "smsim/ldpc.hpp"
#include "smsim/mcs.hpp"
#include "smsim/modem.hpp"

namespace smsim {

inline constexpr std::uint64_t kDefaultInterleaverSeed = 0x11ea5eed;

// One packet is one 204-bit message. A point finishes when it has seen
// min_errors packet errors or max_packets packets, whichever comes first.
struct StopRule {
  long long min_errors = 100;
  long long max_packets = 10'000'000;
};

struct PerPoint {
  double snr_db = 0.0;
  long long packets = 0;
  long long errors = 0;
  double per = 0.0;
  double ci95 = 0.0;  // normal-approximation half width
};

// The single owner of the snr convention: snr is total received signal power
// over total in-band noise power, n_fft * sigma^2 per ofdm symbol.
double noise_variance_per_subcarrier(double snr_db, const OfdmParams& params);

int default_worker_count();

struct LinkConfig {
  OfdmParams ofdm{};
  std::uint64_t code_seed = kDefaultCodeSeed;
  std::uint64_t interleaver_seed = kDefaultInterleaverSeed;
  bool time_domain = false;  // full frame/deframe chain instead of the
                             // frequency-domain noise shortcut
  int workers = 0;           // 0: SMSIM_WORKERS env var, else hardware
  int packets_per_task = 256;
};

// Full coded chain: encode, interleave, modulate, noise, demodulate,
// deinterleave, decode. Packet trials are split into fixed-size tasks with
// per-task random streams keyed by (seed, mcs, snr, task), and the stopping
// rule is applied to whole tasks in index order, so results are identical
// for any worker count.
class LinkSimulator {
 public:
  explicit LinkSimulator(LinkConfig cfg = {});

  PerPoint run_per_point(const McsId& mcs, double snr_db, const StopRule& stop,
                         std::uint64_t seed) const;
  std::vector<PerPoint> per_curve(const McsId& mcs, std::span<const double> snr_grid,
                                  const StopRule& stop, std::uint64_t seed) const;

  const LdpcCode& code() const { return code_; }
  const Interleaver& interleaver() const { return interleaver_; }
  const LinkConfig& config() const { return cfg_; }

 private:
  struct TaskOut {
    long long packets = 0;
    long long errors = 0;
  };
  TaskOut run_task(const McsId& mcs, double sigma2, long long n_packets,
                   std::mt19937_64 rng) const;

  LinkConfig cfg_;
  LdpcCode code_;
  Interleaver interleaver_;
};

struct ThresholdNotBracketed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// snr where log-linear interpolation of the curve crosses target_per;
// throws ThresholdNotBracketed when the curve stays on one side
double extract_threshold(std::span<const PerPoint> curve, double target_per = 1e-3);

struct ThresholdEntry {
  McsId mcs;
  double gamma0_db = 0.0;
  double target_per = 1e-3;
  std::string provenance;  // "simulate" or "paper"
  std::uint64_t seed = 0;
};

struct ThresholdSearch {
  double start_snr_db = 0.0;  // first probe, usually the reference value
  double step_db = 0.6;
  double target_per = 1e-3;
  StopRule stop{100, 200'000};
  int max_points = 12;
};

// Walks outward from start_snr_db in step_db increments until the curve
// brackets target_per, then interpolates. The probed points land in
// *curve_out when given.
ThresholdEntry simulate_threshold(const LinkSimulator& sim, const McsId& mcs,
                                  const ThresholdSearch& search, std::uint64_t seed,
                                  std::vector<PerPoint>* curve_out = nullptr);

// Minimum-snr table consumed by the system-level analysis, persisted as csv
// (columns mcs,m,gamma0_db,target_per,provenance,seed).
class ThresholdTable {
 public:
  static ThresholdTable bundled_reference();

  void set(ThresholdEntry entry);
  bool contains(const McsId& mcs) const;
  double gamma0(const McsId& mcs) const;
  const std::vector<ThresholdEntry>& entries() const { return entries_; }

  // mfsk thresholds must improve strictly with m; the reference table also
  // keeps bpsk between mfsk8 and mfsk4
  void validate_ordering() const;

  void save_csv(const std::filesystem::path& path) const;
  static ThresholdTable load_csv(const std::filesystem::path& path);

 private:
  std::vector<ThresholdEntry> entries_;  // sorted, mfsk by m then bpsk
};

}  // namespace smsim
