#pragma once

#include <cmath>
#include <cstdint>

namespace hjnet {

/// Deterministic counter-based generator (SplitMix64 finalizer over an
/// incrementing Weyl sequence). All randomness in the library flows through
/// this type so that runs are reproducible from a single seed; `split`
/// derives independent child streams from a parent seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return finalize(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the spare deviate is cached, so draws
  /// come in deterministic pairs.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // 1 - u lies in (0, 1], keeping the log argument positive.
    const double u = 1.0 - next_double();
    const double v = next_double();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 6.283185307179586476925286766559 * v;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Child generator for an independent stream; children with distinct ids
  /// are decorrelated from each other and from the parent.
  SplitMix64 split(std::uint64_t stream_id) const {
    return SplitMix64(finalize(state_ + 0xD1342543DE82EF95ULL * (stream_id + 1)));
  }

  std::uint64_t state() const { return state_; }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hjnet
