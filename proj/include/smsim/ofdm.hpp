#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

struct fftw_plan_s;

namespace smsim {

using cplx = std::complex<double>;

struct OfdmParams {
  int n_fft = 256;
  int cp_len = 32;
  int n_data_subcarriers = 256;
  double power_norm = 1.0;

  void validate() const {
    if (n_fft <= 0 || cp_len < 0 || cp_len >= n_fft)
      throw std::invalid_argument("cyclic prefix must be shorter than the fft size");
    if (n_data_subcarriers <= 0 || n_data_subcarriers > n_fft)
      throw std::invalid_argument("data subcarriers cannot exceed the fft size");
    if (power_norm <= 0) throw std::invalid_argument("power_norm must be positive");
  }
};

// frequency-domain cells, symbol-major; data occupies the first
// n_data_subcarriers bins of each symbol
struct FreqGrid {
  int n_fft = 0;
  std::vector<cplx> cells;

  int n_symbols() const { return n_fft ? static_cast<int>(cells.size()) / n_fft : 0; }
  std::span<cplx> symbol(int s) { return {cells.data() + static_cast<std::size_t>(s) * n_fft, static_cast<std::size_t>(n_fft)}; }
  std::span<const cplx> symbol(int s) const { return {cells.data() + static_cast<std::size_t>(s) * n_fft, static_cast<std::size_t>(n_fft)}; }
};

// IFFT/FFT with unitary scaling plus cyclic prefix handling. Owns fftw plans
// and a scratch buffer, so keep one instance per worker thread.
class OfdmFramer {
 public:
  explicit OfdmFramer(const OfdmParams& params);
  ~OfdmFramer();
  OfdmFramer(const OfdmFramer&) = delete;
  OfdmFramer& operator=(const OfdmFramer&) = delete;

  const OfdmParams& params() const { return params_; }

  // grid -> time samples, each symbol prefixed with its last cp_len samples
  std::vector<cplx> frame(const FreqGrid& grid) const;
  // time samples -> grid; sample count must be a multiple of n_fft + cp_len
  FreqGrid deframe(std::span<const cplx> samples) const;

 private:
  OfdmParams params_;
  fftw_plan_s* fwd_ = nullptr;
  fftw_plan_s* bwd_ = nullptr;
  cplx* buf_ = nullptr;
};

}  // namespace smsim
