#include "smsim/ofdm.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace smsim {

namespace {
std::mutex planner_mutex;  // fftw planning is not thread safe
}

OfdmFramer::OfdmFramer(const OfdmParams& params) : params_(params) {
  params_.validate();
  buf_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * params_.n_fft));
  if (!buf_) throw std::bad_alloc();
  std::lock_guard<std::mutex> lock(planner_mutex);
  auto* raw = reinterpret_cast<fftw_complex*>(buf_);
  fwd_ = fftw_plan_dft_1d(params_.n_fft, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(params_.n_fft, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!fwd_ || !bwd_) {
    fftw_free(buf_);
    throw std::runtime_error("fftw plan creation failed");
  }
}

OfdmFramer::~OfdmFramer() {
  std::lock_guard<std::mutex> lock(planner_mutex);
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(bwd_);
  fftw_free(buf_);
}

std::vector<cplx> OfdmFramer::frame(const FreqGrid& grid) const {
  if (grid.n_fft != params_.n_fft) throw std::invalid_argument("grid fft size mismatch");
  int n = params_.n_fft, cp = params_.cp_len;
  double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cplx> out(static_cast<std::size_t>(grid.n_symbols()) * (n + cp));
  for (int s = 0; s < grid.n_symbols(); ++s) {
    std::memcpy(buf_, grid.symbol(s).data(), sizeof(cplx) * n);
    fftw_execute(bwd_);
    cplx* body = out.data() + static_cast<std::size_t>(s) * (n + cp) + cp;
    for (int i = 0; i < n; ++i) body[i] = buf_[i] * scale;
    std::memcpy(body - cp, body + n - cp, sizeof(cplx) * cp);
  }
  return out;
}

FreqGrid OfdmFramer::deframe(std::span<const cplx> samples) const {
  int n = params_.n_fft, cp = params_.cp_len;
  if (samples.size() % (n + cp) != 0)
    throw std::invalid_argument("sample count is not a whole number of ofdm symbols");
  int n_sym = static_cast<int>(samples.size() / (n + cp));
  double scale = 1.0 / std::sqrt(static_cast<double>(n));
  FreqGrid grid{n, std::vector<cplx>(static_cast<std::size_t>(n_sym) * n)};
  for (int s = 0; s < n_sym; ++s) {
    const cplx* body = samples.data() + static_cast<std::size_t>(s) * (n + cp) + cp;
    std::memcpy(buf_, body, sizeof(cplx) * n);
    fftw_execute(fwd_);
    auto sym = grid.symbol(s);
    for (int i = 0; i < n; ++i) sym[i] = buf_[i] * scale;
  }
  return grid;
}

}  // namespace smsim
