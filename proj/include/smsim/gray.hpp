#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "smsim/mcs.hpp"

namespace smsim {

// Binary-reflected Gray labelling of the m tones of one MFSK subset, plus the
// per-bit half-sets the soft detector compares. Bit 0 is the most significant
// label bit.
class GrayMapping {
 public:
  explicit GrayMapping(int m);

  int m() const { return m_; }
  int bits() const { return bits_; }

  std::uint32_t label_of_index(int index) const;
  // inverse of label_of_index, on a bit sequence of length bits()
  int index_of_label(std::span<const std::uint8_t> label_bits) const;

  // tone indices whose label has bit_pos equal to bit_val
  const std::vector<int>& half_set(int bit_pos, int bit_val) const;

 private:
  int m_;
  int bits_;
  std::vector<std::uint32_t> labels_;      // index -> label
  std::vector<int> index_of_;              // label -> index
  std::vector<std::vector<int>> sets_[2];  // [bit value][bit position]
};

}  // namespace smsim
