#pragma once

#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "smsim/gray.hpp"
#include "smsim/mcs.hpp"
#include "smsim/ofdm.hpp"

namespace smsim {

// Coded bits carried by one OFDM symbol. MFSK packs log2(M) bits into each
// M-subcarrier subset, BPSK one bit per data subcarrier.
int bits_per_ofdm_symbol(const McsId& mcs, const OfdmParams& params);

// Subsets are contiguous runs of M data subcarriers. Exactly one tone per
// subset is active, at amplitude sqrt(power_norm * M / n_data) and a phase
// drawn uniformly at random; the detector never uses phase. A short final
// symbol is filled with zero bits.
FreqGrid mfsk_modulate(std::span<const std::uint8_t> coded_bits, const McsId& mcs,
                       const OfdmParams& params, std::mt19937_64& rng);

// bit 0 -> +a, bit 1 -> -a with a = sqrt(power_norm / n_data); zero-padded
// like the MFSK path
FreqGrid bpsk_modulate(std::span<const std::uint8_t> coded_bits, const OfdmParams& params);

// Per-bit soft metric of one received subset: the strongest tone energy in
// the bit's one-half-set minus the strongest in its zero-half-set, so
// positive favors bit 1.
std::vector<double> mfsk_bit_metrics(std::span<const cplx> subset, const GrayMapping& mapping);

// Soft metric rescaled and sign-flipped into the decoder convention
// (positive favors bit 0): llr = -scale * metric.
std::vector<double> mfsk_llr(std::span<const cplx> subset, const GrayMapping& mapping,
                             double scale);

// Calibration factor for the max-energy metric under complex Gaussian noise
// of variance noise_var per subcarrier and tone energy es:
// scale = es / (noise_var * (noise_var + es)).
double mfsk_llr_scale(double tone_energy, double noise_var);

// Exact coherent metric for a +-amplitude subcarrier; noise_var is the
// variance per real dimension (half the per-subcarrier complex variance).
double bpsk_llr(cplx r, double noise_var, double amplitude);

// Demodulate a whole grid to decoder-convention llrs, one per carried bit,
// padding positions included (callers strip the tail).
std::vector<double> demodulate_grid(const FreqGrid& grid, const McsId& mcs,
                                    const OfdmParams& params, double noise_var_per_subcarrier);

// debug dumps; columns documented in the header row
void dump_grid_csv(const FreqGrid& grid, const std::filesystem::path& path);
void dump_llrs_csv(std::span<const double> llrs, const std::filesystem::path& path);

}  // namespace smsim
