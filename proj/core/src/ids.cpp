#include "coex/ids.hpp"

#include <cstdio>

namespace coex {

IdGenerator::IdGenerator() : engine_(std::random_device{}()) {}

IdGenerator::IdGenerator(std::uint64_t seed) : engine_(seed) {}

std::string IdGenerator::next(std::string_view prefix) {
  std::uint64_t v;
  {
    std::lock_guard lock(mutex_);
    v = engine_();
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(v));
  std::string id(prefix);
  id += '-';
  id += hex;
  return id;
}

}  // namespace coex
