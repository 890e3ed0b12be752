#include "stabcert/parallel.hpp"

#include <cstdlib>
#include <string>

namespace stabcert {

unsigned worker_count() {
  if (const char* env = std::getenv("STABCERT_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace stabcert
