#pragma once

#include <cstdint>
#include <random>

namespace rmtfid {

// Every random stream in the library is an mt19937_64 whose seed is derived
// from (master seed, realization index, stream tag) through SplitMix64, so a
// realization never depends on which worker ran it or in what order.
using Engine = std::mt19937_64;

enum class Stream : std::uint64_t {
  spectrum = 0x5350454354ULL,
  perturbation = 0x5045525455ULL,
  moments = 0x4d4f4d454eULL,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    Stream stream) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ index);
  return splitmix64(h ^ static_cast<std::uint64_t>(stream));
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

}  // namespace rmtfid
