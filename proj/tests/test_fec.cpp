#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "smsim/interleaver.hpp"
#include "smsim/ldpc.hpp"
#include "smsim/linklevel.hpp"
#include "smsim/rng.hpp"

using namespace smsim;

namespace {

std::vector<std::uint8_t> random_message(const LdpcCode& code, std::mt19937_64& rng) {
  std::vector<std::uint8_t> m(code.k());
  for (auto& b : m) b = static_cast<std::uint8_t>(rng() & 1);
  return m;
}

// noiseless llrs in the decoder convention: positive means bit 0
std::vector<double> hard_llrs(std::span<const std::uint8_t> bits, double mag) {
  std::vector<double> l(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) l[i] = bits[i] ? -mag : mag;
  return l;
}

const LdpcCode& shared_code() {
  static const LdpcCode code = LdpcCode::make_regular();
  return code;
}

}  // namespace

TEST_CASE("construction gives the contracted regular code") {
  const LdpcCode& code = shared_code();
  CHECK(code.n() == 408);
  CHECK(code.k() == 204);
  CHECK(code.n_checks() == 204);
  for (int v = 0; v < code.n(); ++v) CHECK(code.var_neighbors(v).size() == 3);
  // peg caps check degrees at n*3/(n-k) = 6
  std::size_t edges = 0;
  for (int c = 0; c < code.n_checks(); ++c) {
    CHECK(code.check_neighbors(c).size() <= 6);
    edges += code.check_neighbors(c).size();
  }
  CHECK(edges == static_cast<std::size_t>(3 * code.n()));
}

TEST_CASE("same seed reproduces the identical code") {
  const LdpcCode a = LdpcCode::make_regular(204, 408, 99);
  const LdpcCode b = LdpcCode::make_regular(204, 408, 99);
  for (int c = 0; c < a.n_checks(); ++c)
    CHECK(a.check_neighbors(c) == b.check_neighbors(c));
}

TEST_CASE("all-zero message encodes to the all-zero codeword") {
  const LdpcCode& code = shared_code();
  const std::vector<std::uint8_t> zero(code.k(), 0);
  const auto cw = code.encode(zero);
  REQUIRE(cw.size() == static_cast<std::size_t>(code.n()));
  for (auto b : cw) CHECK(b == 0);
  CHECK(code.parity_ok(cw));
}

TEST_CASE("every codeword satisfies the parity checks and is systematic") {
  const LdpcCode& code = shared_code();
  auto rng = substream(7, {1});
  for (int t = 0; t < 50; ++t) {
    const auto m = random_message(code, rng);
    const auto cw = code.encode(m);
    CHECK(code.parity_ok(cw));
    for (int i = 0; i < code.k(); ++i) REQUIRE(cw[i] == m[i]);
  }
}

TEST_CASE("the code is linear") {
  const LdpcCode& code = shared_code();
  auto rng = substream(7, {2});
  const auto m1 = random_message(code, rng);
  const auto m2 = random_message(code, rng);
  std::vector<std::uint8_t> mx(code.k());
  for (int i = 0; i < code.k(); ++i) mx[i] = m1[i] ^ m2[i];
  const auto c1 = code.encode(m1), c2 = code.encode(m2), cx = code.encode(mx);
  for (int i = 0; i < code.n(); ++i) CHECK(cx[i] == (c1[i] ^ c2[i]));
}

TEST_CASE("encode rejects wrong-length input") {
  const LdpcCode& code = shared_code();
  CHECK_THROWS_AS(code.encode(std::vector<std::uint8_t>(10)), std::invalid_argument);
}

TEST_CASE("noiseless round trip recovers the message") {
  const LdpcCode& code = shared_code();
  BpDecoder dec(code);
  auto rng = substream(7, {3});
  for (int t = 0; t < 20; ++t) {
    const auto m = random_message(code, rng);
    const auto res = dec.decode(hard_llrs(code.encode(m), 12.0));
    CHECK(res.converged);
    CHECK(res.message == m);
    CHECK(res.iterations <= 2);
  }
}

TEST_CASE("saturated llrs decode instantly") {
  const LdpcCode& code = shared_code();
  BpDecoder dec(code);
  auto rng = substream(7, {4});
  const auto m = random_message(code, rng);
  const auto res = dec.decode(hard_llrs(code.encode(m), 200.0));
  CHECK(res.converged);
  CHECK(res.message == m);
}

TEST_CASE("all-zero llrs carry no information") {
  const LdpcCode& code = shared_code();
  BpDecoder dec(code);
  const auto res = dec.decode(std::vector<double>(code.n(), 0.0));
  CHECK_FALSE(res.converged);
}

TEST_CASE("decode rejects bad input") {
  const LdpcCode& code = shared_code();
  BpDecoder dec(code);
  CHECK_THROWS_AS(dec.decode(std::vector<double>(3, 1.0)), std::invalid_argument);
  std::vector<double> nan_llrs(code.n(), 1.0);
  nan_llrs[5] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(dec.decode(nan_llrs), std::invalid_argument);
}

TEST_CASE("monte carlo decode at asymptotic snr") {
  // bpsk-style llrs with mean magnitude about 11: amplitude 1, noise variance
  // 0.18 per dimension, llr = 2*r/sigma^2
  const LdpcCode& code = shared_code();
  BpDecoder dec(code);
  auto rng = substream(7, {5});
  const double var = 0.18;
  std::normal_distribution<double> noise(0.0, std::sqrt(var));
  int ok = 0;
  const int trials = 10'000;
  std::vector<double> llrs(code.n());
  for (int t = 0; t < trials; ++t) {
    const auto m = random_message(code, rng);
    const auto cw = code.encode(m);
    for (int i = 0; i < code.n(); ++i) {
      const double tx = cw[i] ? -1.0 : 1.0;
      llrs[i] = 2.0 * (tx + noise(rng)) / var;
    }
    const auto res = dec.decode(llrs);
    if (res.converged && res.message == m) ++ok;
  }
  CHECK(ok >= trials * 999 / 1000);
}

TEST_CASE("alist round trip preserves the code") {
  const LdpcCode& code = shared_code();
  const auto path = std::filesystem::temp_directory_path() / "smsim_roundtrip.alist";
  code.save_alist(path);
  const LdpcCode loaded = LdpcCode::from_alist(path);
  REQUIRE(loaded.n() == code.n());
  REQUIRE(loaded.k() == code.k());
  for (int c = 0; c < code.n_checks(); ++c)
    CHECK(loaded.check_neighbors(c) == code.check_neighbors(c));
  // encoders agree too
  auto rng = substream(7, {6});
  const auto m = random_message(code, rng);
  CHECK(loaded.encode(m) == code.encode(m));
  std::filesystem::remove(path);
}

TEST_CASE("shipped alist matches the default construction") {
  const auto path = std::filesystem::path(SMSIM_SOURCE_DIR) / "data/ldpc_408_204.alist";
  REQUIRE(std::filesystem::exists(path));
  const LdpcCode loaded = LdpcCode::from_alist(path);
  const LdpcCode& code = shared_code();
  for (int c = 0; c < code.n_checks(); ++c)
    CHECK(loaded.check_neighbors(c) == code.check_neighbors(c));
}

TEST_CASE("interleaver inverts itself for any payload type") {
  const Interleaver il(408, kDefaultInterleaverSeed);
  auto rng = substream(7, {8});
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(408);
    for (auto& v : x) v = std::normal_distribution<double>()(rng);
    CHECK(il.deinterleave(il.interleave(x)) == x);
  }
  std::vector<std::uint8_t> bits(408);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1);
  CHECK(il.deinterleave(il.interleave(bits)) == bits);
}

TEST_CASE("interleaver permutation is a seeded bijection") {
  const Interleaver a(408, 5), b(408, 5), c(408, 6);
  CHECK(a.permutation() == b.permutation());
  CHECK(a.permutation() != c.permutation());
  std::vector<bool> seen(408, false);
  for (auto p : a.permutation()) {
    REQUIRE(p < 408);
    CHECK_FALSE(seen[p]);
    seen[p] = true;
  }
}

TEST_CASE("identity interleaver passes data through") {
  const auto il = Interleaver::identity(16);
  std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  CHECK(il.interleave(x) == x);
  CHECK(il.deinterleave(x) == x);
}

TEST_CASE("interleaver rejects length mismatch") {
  const Interleaver il(408, 1);
  CHECK_THROWS_AS(il.interleave(std::vector<double>(16)), std::invalid_argument);
  CHECK_THROWS_AS(il.deinterleave(std::vector<double>(16)), std::invalid_argument);
}
