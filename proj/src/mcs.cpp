#include "smsim/mcs.hpp"

namespace smsim {

McsId mcs_from_name(std::string_view name) {
  if (name == "bpsk") return McsId::bpsk();
  for (int m : kMfskSizes)
    if (name == "mfsk" + std::to_string(m)) return McsId::mfsk(m);
  throw std::invalid_argument("unknown mcs name: " + std::string(name));
}

std::array<McsId, 7> all_mcs() {
  std::array<McsId, 7> out{};
  std::size_t i = 0;
  for (auto it = kMfskSizes.rbegin(); it != kMfskSizes.rend(); ++it) out[i++] = McsId::mfsk(*it);
  out[i] = McsId::bpsk();
  return out;
}

}  // namespace smsim
