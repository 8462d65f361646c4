#pragma once

// Hand-rolled property testing: each case gets its own seeded generator so
// a failing case index reproduces on its own.

#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <string>

#include "solrad/random.hpp"

namespace solrad::testing {

template <typename F>
void for_all(int cases, std::uint64_t seed, F&& body) {
  for (int i = 0; i < cases; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    CAPTURE(i);
    body(rng);
  }
}

/// Fresh empty directory under the system temp dir.
inline std::string fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("solrad_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace solrad::testing
