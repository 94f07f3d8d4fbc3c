#include "kpeval/hashing.hpp"

#include <cstdio>

namespace kpeval {

std::string Fnv1a::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

}  // namespace kpeval
