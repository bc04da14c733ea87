#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "smsim/channel.hpp"
#include "smsim/modem.hpp"
#include "smsim/ofdm.hpp"
#include "smsim/rng.hpp"

using namespace smsim;
using doctest::Approx;

namespace {

std::vector<std::uint8_t> random_bits(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1);
  return bits;
}

}  // namespace

TEST_CASE("bits per ofdm symbol") {
  const OfdmParams p;
  CHECK(bits_per_ofdm_symbol(McsId::bpsk(), p) == 256);
  CHECK(bits_per_ofdm_symbol(McsId::mfsk(2), p) == 128);
  CHECK(bits_per_ofdm_symbol(McsId::mfsk(4), p) == 128);
  CHECK(bits_per_ofdm_symbol(McsId::mfsk(8), p) == 96);
  CHECK(bits_per_ofdm_symbol(McsId::mfsk(16), p) == 64);
  CHECK(bits_per_ofdm_symbol(McsId::mfsk(64), p) == 24);
  CHECK(bits_per_ofdm_symbol(McsId::mfsk(256), p) == 8);

  OfdmParams odd = p;
  odd.n_data_subcarriers = 100;  // 64 does not divide it
  CHECK_THROWS_AS(bits_per_ofdm_symbol(McsId::mfsk(64), odd), std::invalid_argument);
}

TEST_CASE("gray labelling") {
  const GrayMapping g4(4);
  // binary-reflected sequence over 4 tones
  CHECK(g4.label_of_index(0) == 0b00);
  CHECK(g4.label_of_index(1) == 0b01);
  CHECK(g4.label_of_index(2) == 0b11);
  CHECK(g4.label_of_index(3) == 0b10);

  const GrayMapping g2(2);
  CHECK(g2.label_of_index(0) == 0);
  CHECK(g2.label_of_index(1) == 1);

  // adjacent labels differ in exactly one bit
  const GrayMapping g8(8);
  for (int i = 0; i + 1 < 8; ++i) {
    const auto diff = g8.label_of_index(i) ^ g8.label_of_index(i + 1);
    CHECK(std::popcount(diff) == 1);
  }
}

TEST_CASE("gray half-sets partition the subset") {
  for (int m : kMfskSizes) {
    const GrayMapping g(m);
    for (int bit = 0; bit < g.bits(); ++bit) {
      const auto& s0 = g.half_set(bit, 0);
      const auto& s1 = g.half_set(bit, 1);
      CHECK(s0.size() == static_cast<std::size_t>(m / 2));
      CHECK(s1.size() == static_cast<std::size_t>(m / 2));
      std::vector<bool> seen(m, false);
      for (int i : s0) seen[i] = true;
      for (int i : s1) {
        CHECK_FALSE(seen[i]);
        seen[i] = true;
      }
      CHECK(std::count(seen.begin(), seen.end(), true) == m);
    }
  }
  CHECK_THROWS_AS(GrayMapping(3), std::invalid_argument);
  const GrayMapping g4(4);
  CHECK_THROWS_AS(g4.half_set(2, 0), std::invalid_argument);
}

TEST_CASE("metric equals an independent brute-force half-set scan") {
  auto rng = substream(1, {10});
  std::normal_distribution<double> gauss;
  for (int m : kMfskSizes) {
    const GrayMapping g(m);
    const int bits = g.bits();
    std::vector<cplx> subset(m);
    for (int t = 0; t < 2'000 / bits; ++t) {
      for (auto& c : subset) c = {gauss(rng), gauss(rng)};
      const auto metrics = mfsk_bit_metrics(subset, g);
      for (int b = 0; b < bits; ++b) {
        double best[2] = {-1.0, -1.0};
        for (int i = 0; i < m; ++i) {
          const std::uint32_t label = static_cast<std::uint32_t>(i ^ (i >> 1));
          const int bit = (label >> (bits - 1 - b)) & 1;
          best[bit] = std::max(best[bit], std::norm(subset[i]));
        }
        CHECK(metrics[b] == Approx(best[1] - best[0]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("gray label inverse") {
  const GrayMapping g(16);
  for (int i = 0; i < 16; ++i) {
    const auto label = g.label_of_index(i);
    std::vector<std::uint8_t> bits(g.bits());
    for (int b = 0; b < g.bits(); ++b) bits[b] = (label >> (g.bits() - 1 - b)) & 1;
    CHECK(g.index_of_label(bits) == i);
  }
}

TEST_CASE("mfsk activates the gray-selected tone in a small grid") {
  // 8 data subcarriers, M=4: two subsets; bits 00 -> index 0, 01 -> index 1
  OfdmParams p;
  p.n_fft = 8;
  p.cp_len = 2;
  p.n_data_subcarriers = 8;
  auto rng = substream(1, {1});
  const std::vector<std::uint8_t> bits{0, 0, 0, 1};
  const FreqGrid grid = mfsk_modulate(bits, McsId::mfsk(4), p, rng);
  REQUIRE(grid.n_symbols() == 1);
  const double amp = std::sqrt(p.power_norm * 4 / 8);
  for (int i = 0; i < 8; ++i) {
    const bool active = i == 0 || i == 5;
    CHECK(std::abs(grid.cells[i]) == Approx(active ? amp : 0.0).epsilon(1e-12));
  }
}

TEST_CASE("mfsk grid is sparse with the right power") {
  const OfdmParams p;
  auto rng = substream(1, {2});
  for (int m : {4, 16, 256}) {
    const McsId mcs = McsId::mfsk(m);
    const auto bits = random_bits(bits_per_ofdm_symbol(mcs, p), rng);
    const FreqGrid grid = mfsk_modulate(bits, mcs, p, rng);
    REQUIRE(grid.n_symbols() == 1);
    int active = 0;
    double power = 0.0;
    for (const cplx& c : grid.cells) {
      if (std::abs(c) > 1e-12) ++active;
      power += std::norm(c);
    }
    CHECK(active == p.n_data_subcarriers / m);
    CHECK(power == Approx(p.power_norm).epsilon(1e-12));
  }
}

TEST_CASE("bpsk modulation and padding") {
  const OfdmParams p;
  auto rng = substream(1, {3});
  const std::vector<std::uint8_t> zeros(256, 0);
  const FreqGrid grid = bpsk_modulate(zeros, p);
  const double a = std::sqrt(p.power_norm / p.n_data_subcarriers);
  for (const cplx& c : grid.cells) {
    CHECK(c.real() == Approx(a).epsilon(1e-12));
    CHECK(c.imag() == 0.0);
  }
  double power = 0.0;
  for (const cplx& c : grid.cells) power += std::norm(c);
  CHECK(power == Approx(p.power_norm).epsilon(1e-12));

  // 300 bits need two symbols, the tail padded with bit 0
  const auto bits = random_bits(300, rng);
  const FreqGrid two = bpsk_modulate(bits, p);
  REQUIRE(two.n_symbols() == 2);
  for (int i = 300; i < 512; ++i) CHECK(two.cells[i].real() == Approx(a));
}

TEST_CASE("frame/deframe is a 1e-10 round trip") {
  const OfdmParams p;
  const OfdmFramer framer(p);
  auto rng = substream(1, {4});
  FreqGrid grid;
  grid.n_fft = p.n_fft;
  grid.cells.resize(3 * p.n_fft);
  std::normal_distribution<double> gauss;
  for (auto& c : grid.cells) c = {gauss(rng), gauss(rng)};

  const auto samples = framer.frame(grid);
  REQUIRE(samples.size() == static_cast<std::size_t>(3 * (p.n_fft + p.cp_len)));
  const FreqGrid back = framer.deframe(samples);
  REQUIRE(back.cells.size() == grid.cells.size());
  for (std::size_t i = 0; i < grid.cells.size(); ++i)
    CHECK(std::abs(back.cells[i] - grid.cells[i]) < 1e-10);
}

TEST_CASE("framing inserts a true cyclic prefix and keeps power") {
  const OfdmParams p;
  const OfdmFramer framer(p);
  auto rng = substream(1, {5});
  FreqGrid grid;
  grid.n_fft = p.n_fft;
  grid.cells.resize(p.n_fft);
  std::normal_distribution<double> gauss;
  for (auto& c : grid.cells) c = {gauss(rng), gauss(rng)};

  const auto samples = framer.frame(grid);
  for (int i = 0; i < p.cp_len; ++i)
    CHECK(std::abs(samples[i] - samples[p.n_fft + i]) < 1e-12);

  // unitary transform: body energy equals grid energy
  double grid_e = 0.0, body_e = 0.0;
  for (const auto& c : grid.cells) grid_e += std::norm(c);
  for (int i = p.cp_len; i < p.n_fft + p.cp_len; ++i) body_e += std::norm(samples[i]);
  CHECK(body_e == Approx(grid_e).epsilon(1e-10));

  CHECK_THROWS_AS(framer.deframe(std::vector<cplx>(17)), std::invalid_argument);
}

TEST_CASE("single tone becomes a complex exponential") {
  OfdmParams p;
  p.n_fft = 8;
  p.cp_len = 0;
  p.n_data_subcarriers = 8;
  const OfdmFramer framer(p);
  FreqGrid grid;
  grid.n_fft = 8;
  grid.cells.resize(8);
  grid.cells[1] = 1.0;
  const auto samples = framer.frame(grid);
  const double amp = 1.0 / std::sqrt(8.0);
  for (int t = 0; t < 8; ++t) {
    const cplx expect = amp * std::exp(cplx(0.0, 2.0 * std::numbers::pi * t / 8.0));
    CHECK(std::abs(samples[t] - expect) < 1e-12);
  }
}

TEST_CASE("worked soft-metric example") {
  // energies [4, 1, 0.25, 0.25]: strongest overall is tone 0 (label 00)
  const GrayMapping g(4);
  const std::vector<cplx> subset{2.0, 1.0, 0.5, 0.5};
  const auto metrics = mfsk_bit_metrics(subset, g);
  REQUIRE(metrics.size() == 2);
  // bit 0: ones live on tones {2,3} -> 0.25; zeros on {0,1} -> 4
  CHECK(metrics[0] == Approx(-3.75));
  // bit 1: ones live on tones {1,2} -> 1; zeros on {0,3} -> 4
  CHECK(metrics[1] == Approx(-3.0));

  // decoder convention flips the sign: both bits lean to 0
  const auto llrs = mfsk_llr(subset, g, 2.0);
  CHECK(llrs[0] == Approx(7.5));
  CHECK(llrs[1] == Approx(6.0));

  CHECK_THROWS_AS(mfsk_bit_metrics(std::vector<cplx>(3), g), std::invalid_argument);
}

TEST_CASE("equal energies give zero metric") {
  const GrayMapping g(8);
  const std::vector<cplx> flat(8, cplx(0.7, -0.7));
  for (double v : mfsk_bit_metrics(flat, g)) CHECK(v == Approx(0.0));
}

TEST_CASE("metric scales with subset energy scaling") {
  const GrayMapping g(4);
  auto rng = substream(1, {6});
  std::normal_distribution<double> gauss;
  std::vector<cplx> subset(4);
  for (auto& c : subset) c = {gauss(rng), gauss(rng)};
  std::vector<cplx> scaled(4);
  for (int i = 0; i < 4; ++i) scaled[i] = 3.0 * subset[i];
  const auto m1 = mfsk_bit_metrics(subset, g);
  const auto m2 = mfsk_bit_metrics(scaled, g);
  for (std::size_t i = 0; i < m1.size(); ++i) CHECK(m2[i] == Approx(9.0 * m1[i]));
}

TEST_CASE("metric sign agrees with maximum-likelihood tone choice") {
  // the strongest tone's label should be favored bit for bit
  auto rng = substream(1, {7});
  std::normal_distribution<double> gauss;
  for (int m : kMfskSizes) {
    const GrayMapping g(m);
    std::vector<cplx> subset(m);
    for (int t = 0; t < 10'000 / m; ++t) {
      for (auto& c : subset) c = {gauss(rng), gauss(rng)};
      int best = 0;
      for (int i = 1; i < m; ++i)
        if (std::norm(subset[i]) > std::norm(subset[best])) best = i;
      const auto metrics = mfsk_bit_metrics(subset, g);
      const auto label = g.label_of_index(best);
      for (int b = 0; b < g.bits(); ++b) {
        const int bit = (label >> (g.bits() - 1 - b)) & 1;
        if (bit == 1)
          CHECK(metrics[b] > 0.0);
        else
          CHECK(metrics[b] < 0.0);
      }
    }
  }
}

TEST_CASE("bpsk llr sign and magnitude") {
  const double a = 0.0625;  // sqrt(1/256)
  CHECK(bpsk_llr(cplx(0.0, 3.0), 0.1, a) == Approx(0.0));
  CHECK(bpsk_llr(cplx(a, 0.0), 0.05, a) == Approx(4.0 * a * a / 0.1));
  CHECK(bpsk_llr(cplx(-a, 0.0), 0.05, a) < 0.0);

  // sign matches the nearer constellation point
  auto rng = substream(1, {8});
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 10'000; ++t) {
    const cplx r{gauss(rng), gauss(rng)};
    const double l = bpsk_llr(r, 0.5, a);
    if (r.real() > 0.0) CHECK(l > 0.0);
    if (r.real() < 0.0) CHECK(l < 0.0);
  }

  CHECK_THROWS_AS(bpsk_llr(cplx(1.0, 0.0), 0.0, a), std::invalid_argument);
}

TEST_CASE("demodulated grid llrs favor the transmitted bits when noiseless") {
  const OfdmParams p;
  auto rng = substream(1, {9});
  for (int m : {2, 8, 256}) {
    const McsId mcs = McsId::mfsk(m);
    const auto bits = random_bits(bits_per_ofdm_symbol(mcs, p), rng);
    const FreqGrid grid = mfsk_modulate(bits, mcs, p, rng);
    const auto llrs = demodulate_grid(grid, mcs, p, 0.01);
    REQUIRE(llrs.size() == bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
      CHECK((bits[i] ? llrs[i] < 0.0 : llrs[i] > 0.0));
  }
  const auto bits = random_bits(256, rng);
  const auto llrs = demodulate_grid(bpsk_modulate(bits, p), McsId::bpsk(), p, 0.01);
  for (std::size_t i = 0; i < bits.size(); ++i)
    CHECK((bits[i] ? llrs[i] < 0.0 : llrs[i] > 0.0));
}

TEST_CASE("llr scale calibration formula") {
  CHECK(mfsk_llr_scale(1.0, 1.0) == Approx(0.5));
  CHECK(mfsk_llr_scale(2.0, 0.5) == Approx(2.0 / (0.5 * 2.5)));
  CHECK_THROWS_AS(mfsk_llr_scale(1.0, 0.0), std::invalid_argument);
}
