#include "smsim/gray.hpp"

namespace smsim {

GrayMapping::GrayMapping(int m) : m_(m) {
  if (m < 2 || (m & (m - 1)) != 0)
    throw std::invalid_argument("subset size must be a power of two >= 2, got " +
                                std::to_string(m));
  bits_ = ilog2(m);
  labels_.resize(m);
  index_of_.resize(m);
  sets_[0].resize(bits_);
  sets_[1].resize(bits_);
  for (int i = 0; i < m; ++i) {
    std::uint32_t label = static_cast<std::uint32_t>(i ^ (i >> 1));
    labels_[i] = label;
    index_of_[label] = i;
    for (int b = 0; b < bits_; ++b) {
      int val = (label >> (bits_ - 1 - b)) & 1u;
      sets_[val][b].push_back(i);
    }
  }
}

std::uint32_t GrayMapping::label_of_index(int index) const {
  if (index < 0 || index >= m_) throw std::invalid_argument("tone index out of range");
  return labels_[index];
}

int GrayMapping::index_of_label(std::span<const std::uint8_t> label_bits) const {
  if (static_cast<int>(label_bits.size()) != bits_)
    throw std::invalid_argument("label length mismatch: expected " + std::to_string(bits_) +
                                " bits, got " + std::to_string(label_bits.size()));
  std::uint32_t label = 0;
  for (int b = 0; b < bits_; ++b) label = (label << 1) | (label_bits[b] & 1u);
  return index_of_[label];
}

const std::vector<int>& GrayMapping::half_set(int bit_pos, int bit_val) const {
  if (bit_pos < 0 || bit_pos >= bits_) throw std::invalid_argument("bit position out of range");
  if (bit_val != 0 && bit_val != 1) throw std::invalid_argument("bit value must be 0 or 1");
  return sets_[bit_val][bit_pos];
}

}  // namespace smsim
