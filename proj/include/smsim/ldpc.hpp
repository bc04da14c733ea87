#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "smsim/mcs.hpp"

namespace smsim {

inline constexpr std::uint64_t kDefaultCodeSeed = 0x10dc5eed;

// Rate-1/2 regular LDPC code, 204 info bits in a 408-bit codeword.
// Codewords are systematic: positions [0,k) carry the message, [k,n) the
// parity. The graph is grown edge by edge, always attaching each new edge as
// far as possible from the variable's existing neighborhood, which keeps
// short cycles out; ties are broken with a seeded draw so the construction is
// reproducible from (k, n, seed) alone.
class LdpcCode {
 public:
  static LdpcCode make_regular(int k = 204, int n = 408, std::uint64_t seed = kDefaultCodeSeed);
  static LdpcCode from_alist(const std::filesystem::path& path);
  void save_alist(const std::filesystem::path& path) const;

  int k() const { return k_; }
  int n() const { return n_; }
  int n_checks() const { return n_ - k_; }
  int max_iterations() const { return max_iterations_; }
  void set_max_iterations(int it);
  std::uint64_t seed() const { return seed_; }

  const std::vector<int>& check_neighbors(int check) const { return chk_vars_[check]; }
  const std::vector<int>& var_neighbors(int var) const { return var_chks_[var]; }

  std::vector<std::uint8_t> encode(std::span<const std::uint8_t> message) const;
  bool parity_ok(std::span<const std::uint8_t> codeword) const;

 private:
  LdpcCode() = default;
  void finish_construction();  // column arrangement + encoder table
  void build_var_adjacency();

  int n_ = 0, k_ = 0;
  int max_iterations_ = 50;
  std::uint64_t seed_ = 0;
  std::vector<std::vector<int>> chk_vars_;  // check -> variables
  std::vector<std::vector<int>> var_chks_;  // variable -> checks
  // parity generator: row i gives parity bit i as an xor over message bits
  std::vector<std::uint64_t> parity_rows_;
  int msg_words_ = 0;
};

struct DecodeResult {
  std::vector<std::uint8_t> message;
  bool converged = false;
  int iterations = 0;
};

// Sum-product decoder. Holds per-instance scratch, so give each worker its
// own decoder; the code itself is shared read-only.
class BpDecoder {
 public:
  explicit BpDecoder(const LdpcCode& code);

  // llrs follow the project convention: positive favors bit 0
  DecodeResult decode(std::span<const double> llrs);

  const LdpcCode& code() const { return *code_; }

 private:
  const LdpcCode* code_;
  std::vector<int> chk_edges_;   // per check, edge ids in variable-major layout
  std::vector<int> chk_degree_offsets_;
  std::vector<double> v2c_, c2v_, posterior_;
  std::vector<std::uint8_t> hard_;
};

}  // namespace smsim
