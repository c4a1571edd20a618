#include "momentsnet/parallel.hpp"

#include <cstdlib>
#include <string>

namespace momentsnet {

unsigned resolve_threads(unsigned requested) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (const char* cap = std::getenv("MOMENTSNET_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(cap, &end, 10);
    if (end != cap && v > 0) n = std::min<unsigned long>(n, v);
  }
  return n;
}

}  // namespace momentsnet
