// Shared vocabulary types, error classes and small deterministic helpers.

#ifndef CITETIME_COMMON_HPP
#define CITETIME_COMMON_HPP

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace citetime {

using Real = double;
using Vec = std::vector<Real>;

/// Dense index of a paper inside a Corpus. Papers are stored sorted by their
/// external string id, so ascending index order equals ascending id order.
using PaperIndex = std::uint32_t;

/// Malformed or inconsistent input data. Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN/Inf during optimisation. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration. Maps to CLI exit code 1.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Rng = std::mt19937_64;

// splitmix64 finaliser; used to derive independent stream seeds from
// (seed, stream) pairs so parallel work stays reproducible.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline Real uniform01(Rng& rng) {
  return static_cast<Real>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(uniform01(rng) * static_cast<Real>(n)) % n;
}

/// 64-bit FNV-1a; stable across platforms, used for config hashes and
/// artifact checksums in the pipeline log.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v);

}  // namespace citetime

#endif  // CITETIME_COMMON_HPP
