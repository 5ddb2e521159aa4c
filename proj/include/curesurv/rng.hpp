#pragma once

#include <cstdint>
#include <random>

namespace curesurv {

/// Independent generator for stream `stream` of a run seeded with `seed`.
///
/// Every stochastic routine derives one substream per logical unit (subject,
/// resample, permutation, start), so results do not depend on the order in
/// which units are processed.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform draw on the open interval (0, 1).
template <class Engine>
double uniform_open01(Engine& engine) {
  // 53 random bits, shifted half a step so neither endpoint is reachable.
  const auto bits = engine() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace curesurv
