#pragma once

#include <cstdint>
#include <mutex>
#include <random>
#include <string>
#include <string_view>

namespace coex {

/// Produces prefixed random identifiers such as "ex-3f09a1c2b4d5e6f7".
/// Seeded instances are reproducible; thread-safe.
class IdGenerator {
 public:
  IdGenerator();  // seeded from std::random_device
  explicit IdGenerator(std::uint64_t seed);

  std::string next(std::string_view prefix);

 private:
  std::mutex mutex_;
  std::mt19937_64 engine_;
};

}  // namespace coex
