#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "smsim/rng.hpp"

namespace smsim {

// Seeded uniform permutation over the codeword bits. interleave() reads
// through the permutation, deinterleave() scatters back, so
// deinterleave(interleave(x)) == x for any element type.
class Interleaver {
 public:
  Interleaver(std::size_t n, std::uint64_t seed) : seed_(seed), perm_(n) {
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    Splitmix g(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(perm_[i - 1], perm_[g.below(i)]);
  }

  static Interleaver identity(std::size_t n) {
    Interleaver il(n, 0);
    std::iota(il.perm_.begin(), il.perm_.end(), std::size_t{0});
    return il;
  }

  std::size_t size() const { return perm_.size(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::size_t>& permutation() const { return perm_; }

  template <typename T>
  std::vector<T> interleave(std::span<const T> in) const {
    check(in.size());
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[perm_[i]];
    return out;
  }

  template <typename T>
  std::vector<T> deinterleave(std::span<const T> in) const {
    check(in.size());
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[perm_[i]] = in[i];
    return out;
  }

  template <typename T>
  std::vector<T> interleave(const std::vector<T>& in) const {
    return interleave(std::span<const T>(in));
  }
  template <typename T>
  std::vector<T> deinterleave(const std::vector<T>& in) const {
    return deinterleave(std::span<const T>(in));
  }

 private:
  void check(std::size_t got) const {
    if (got != perm_.size())
      throw std::invalid_argument("interleaver length mismatch: expected " +
                                  std::to_string(perm_.size()) + ", got " + std::to_string(got));
  }

  std::uint64_t seed_;
  std::vector<std::size_t> perm_;
};

}  // namespace smsim
