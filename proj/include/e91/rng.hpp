#pragma once

// Counter-based randomness for the protocol simulation. Every draw is a pure
// function of (seed, trial index, draw counter), so any partition of the
// trials over workers reproduces the same per-trial outcomes.
//
//   run_key   = mix64(seed ^ 0x6a09e667f3bcc909)
//   trial_key = mix64(run_key ^ mix64(trial + golden))
//   word(n)   = mix64(trial_key + (n + 1) * golden)
//
// where mix64 is the splitmix64 finalizer and golden = 0x9e3779b97f4a7c15.

#include <cstdint>
#include <limits>

namespace e91 {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit_interval(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

class TrialStream {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

  constexpr TrialStream(std::uint64_t seed, std::uint64_t trial)
      : key_(mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) ^ mix64(trial + golden))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() { return mix64(key_ + (++counter_) * golden); }

  constexpr double uniform() { return to_unit_interval((*this)()); }

  constexpr std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace e91
