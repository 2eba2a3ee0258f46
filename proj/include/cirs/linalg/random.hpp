#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "cirs/linalg/dense.hpp"

namespace cirs {

/// Block with i.i.d. uniform(-1, 1) entries, filled column by column.
///
/// The mapping from mt19937_64 output to doubles is done by hand so the
/// stream does not depend on the standard library's distribution code.
inline Block random_block(std::size_t n, std::size_t s, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Block out(n, s);
  for (double& v : out.values()) {
    const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v = 2.0 * unit - 1.0;
  }
  return out;
}

}  // namespace cirs
