#include "apc/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace apc {

unsigned resolve_thread_count(std::optional<unsigned> requested) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("APC_SPECTRA_THREADS")) {
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), value);
    if (ec == std::errc{} && value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace apc
