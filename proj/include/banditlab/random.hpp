#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace banditlab {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds an ordered list of words into a single key. Order matters.
inline std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) {
    h = mix64(h ^ mix64(w + 0x9e3779b97f4a7c15ULL));
  }
  return h;
}

// Counter-based generator: the whole stream is a pure function of the key,
// so any (seed, t, i, j) cell can be generated independently of the others.
// Satisfies UniformRandomBitGenerator.
class KeyedRng {
 public:
  using result_type = std::uint64_t;

  explicit KeyedRng(std::uint64_t key) noexcept : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Independent streams derived from one master seed. Environment purposes are
// keyed without the policy so every policy sees the same realizations.
enum class StreamPurpose : std::uint64_t {
  kEnvironment = 1,
  kLosses = 2,
  kDelays = 3,
  kPolicy = 4,
};

inline std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose,
                                 std::uint64_t replication, std::uint64_t salt = 0) noexcept {
  return hash_words({master, static_cast<std::uint64_t>(purpose), replication, salt});
}

using PolicyRng = std::mt19937_64;

}  // namespace banditlab
