#include "smsim/modem.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace smsim {

namespace {

void check_mfsk_fit(const McsId& mcs, const OfdmParams& params) {
  if (!mcs.is_mfsk()) throw std::invalid_argument("expected an mfsk scheme");
  if (params.n_data_subcarriers % mcs.m != 0)
    throw std::invalid_argument("subset size " + std::to_string(mcs.m) +
                                " does not divide " + std::to_string(params.n_data_subcarriers) +
                                " data subcarriers");
}

int symbols_needed(std::size_t n_bits, int bits_per_symbol) {
  return static_cast<int>((n_bits + bits_per_symbol - 1) / bits_per_symbol);
}

}  // namespace

int bits_per_ofdm_symbol(const McsId& mcs, const OfdmParams& params) {
  params.validate();
  if (!mcs.is_mfsk()) return params.n_data_subcarriers;
  check_mfsk_fit(mcs, params);
  return params.n_data_subcarriers / mcs.m * mcs.bits_per_subset();
}

FreqGrid mfsk_modulate(std::span<const std::uint8_t> coded_bits, const McsId& mcs,
                       const OfdmParams& params, std::mt19937_64& rng) {
  params.validate();
  check_mfsk_fit(mcs, params);
  if (coded_bits.empty()) throw std::invalid_argument("no bits to modulate");
  int bps = bits_per_ofdm_symbol(mcs, params);
  int n_sym = symbols_needed(coded_bits.size(), bps);
  int k = mcs.bits_per_subset();
  int subsets_per_symbol = params.n_data_subcarriers / mcs.m;
  double amp = std::sqrt(params.power_norm * mcs.m / params.n_data_subcarriers);
  GrayMapping mapping(mcs.m);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  FreqGrid grid{params.n_fft, std::vector<cplx>(static_cast<std::size_t>(n_sym) * params.n_fft)};
  std::size_t pos = 0;
  std::uint8_t label[32];
  for (int s = 0; s < n_sym; ++s) {
    auto sym = grid.symbol(s);
    for (int sub = 0; sub < subsets_per_symbol; ++sub) {
      for (int b = 0; b < k; ++b, ++pos)
        label[b] = pos < coded_bits.size() ? (coded_bits[pos] & 1) : 0;
      int tone = mapping.index_of_label({label, static_cast<std::size_t>(k)});
      double ph = phase(rng);
      sym[sub * mcs.m + tone] = cplx(amp * std::cos(ph), amp * std::sin(ph));
    }
  }
  return grid;
}

FreqGrid bpsk_modulate(std::span<const std::uint8_t> coded_bits, const OfdmParams& params) {
  params.validate();
  if (coded_bits.empty()) throw std::invalid_argument("no bits to modulate");
  int bps = params.n_data_subcarriers;
  int n_sym = symbols_needed(coded_bits.size(), bps);
  double amp = std::sqrt(params.power_norm / params.n_data_subcarriers);

  FreqGrid grid{params.n_fft, std::vector<cplx>(static_cast<std::size_t>(n_sym) * params.n_fft)};
  std::size_t pos = 0;
  for (int s = 0; s < n_sym; ++s) {
    auto sym = grid.symbol(s);
    for (int i = 0; i < bps; ++i, ++pos) {
      bool one = pos < coded_bits.size() && (coded_bits[pos] & 1);
      sym[i] = cplx(one ? -amp : amp, 0.0);
    }
  }
  return grid;
}

std::vector<double> mfsk_bit_metrics(std::span<const cplx> subset, const GrayMapping& mapping) {
  if (static_cast<int>(subset.size()) != mapping.m())
    throw std::invalid_argument("subset length mismatch: expected " +
                                std::to_string(mapping.m()) + ", got " +
                                std::to_string(subset.size()));
  std::vector<double> energy(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) energy[i] = std::norm(subset[i]);
  std::vector<double> metrics(mapping.bits());
  for (int b = 0; b < mapping.bits(); ++b) {
    double best1 = -1.0, best0 = -1.0;
    for (int i : mapping.half_set(b, 1)) best1 = std::max(best1, energy[i]);
    for (int i : mapping.half_set(b, 0)) best0 = std::max(best0, energy[i]);
    metrics[b] = best1 - best0;
  }
  return metrics;
}

std::vector<double> mfsk_llr(std::span<const cplx> subset, const GrayMapping& mapping,
                             double scale) {
  auto metrics = mfsk_bit_metrics(subset, mapping);
  for (double& v : metrics) v *= -scale;
  return metrics;
}

double mfsk_llr_scale(double tone_energy, double noise_var) {
  if (tone_energy <= 0 || noise_var <= 0)
    throw std::invalid_argument("tone energy and noise variance must be positive");
  return tone_energy / (noise_var * (noise_var + tone_energy));
}

double bpsk_llr(cplx r, double noise_var, double amplitude) {
  if (noise_var <= 0) throw std::invalid_argument("noise variance must be positive");
  return 4.0 * amplitude * r.real() / (2.0 * noise_var);
}

std::vector<double> demodulate_grid(const FreqGrid& grid, const McsId& mcs,
                                    const OfdmParams& params, double noise_var_per_subcarrier) {
  params.validate();
  if (noise_var_per_subcarrier <= 0) throw std::invalid_argument("noise variance must be positive");
  int n_sym = grid.n_symbols();
  std::vector<double> llrs;
  if (!mcs.is_mfsk()) {
    double amp = std::sqrt(params.power_norm / params.n_data_subcarriers);
    double per_dim = 0.5 * noise_var_per_subcarrier;
    llrs.reserve(static_cast<std::size_t>(n_sym) * params.n_data_subcarriers);
    for (int s = 0; s < n_sym; ++s) {
      auto sym = grid.symbol(s);
      for (int i = 0; i < params.n_data_subcarriers; ++i)
        llrs.push_back(bpsk_llr(sym[i], per_dim, amp));
    }
    return llrs;
  }
  check_mfsk_fit(mcs, params);
  GrayMapping mapping(mcs.m);
  double es = params.power_norm * mcs.m / params.n_data_subcarriers;
  double scale = mfsk_llr_scale(es, noise_var_per_subcarrier);
  int subsets_per_symbol = params.n_data_subcarriers / mcs.m;
  llrs.reserve(static_cast<std::size_t>(n_sym) * subsets_per_symbol * mapping.bits());
  for (int s = 0; s < n_sym; ++s) {
    auto sym = grid.symbol(s);
    for (int sub = 0; sub < subsets_per_symbol; ++sub) {
      auto vals = mfsk_llr(sym.subspan(static_cast<std::size_t>(sub) * mcs.m, mcs.m), mapping, scale);
      llrs.insert(llrs.end(), vals.begin(), vals.end());
    }
  }
  return llrs;
}

void dump_grid_csv(const FreqGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "symbol,subcarrier,re,im\n";
  char line[96];
  for (int s = 0; s < grid.n_symbols(); ++s) {
    auto sym = grid.symbol(s);
    for (int i = 0; i < grid.n_fft; ++i) {
      std::snprintf(line, sizeof line, "%d,%d,%.12g,%.12g\n", s, i, sym[i].real(), sym[i].imag());
      out << line;
    }
  }
}

void dump_llrs_csv(std::span<const double> llrs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "index,llr\n";
  char line[64];
  for (std::size_t i = 0; i < llrs.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.12g\n", i, llrs[i]);
    out << line;
  }
}

}  // namespace smsim
