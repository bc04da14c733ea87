// Regenerates the canonical parity-check matrix shipped in data/. The
// construction is deterministic, so this only needs rerunning when the code
// parameters or the construction seed change.
#include <cstdio>

#include "smsim/ldpc.hpp"

int main(int argc, char** argv) {
  const char* path = argc > 1 ? argv[1] : "data/ldpc_408_204.alist";
  try {
    auto code = smsim::LdpcCode::make_regular();
    code.save_alist(path);
    std::printf("wrote %s (n=%d, k=%d, seed=%#llx)\n", path, code.n(), code.k(),
                static_cast<unsigned long long>(code.seed()));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
