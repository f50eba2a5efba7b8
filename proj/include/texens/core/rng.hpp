#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

#include "texens/core/hash.hpp"

namespace texens {

/// Counter-based random stream. The i-th draw is splitmix64(key + i*gamma),
/// so a stream is fully determined by its key and is independent of any
/// other stream or of evaluation order.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t key) : key_(key) {}

  /// Key derived from a master seed and a (sample_id, epoch, purpose) tuple.
  static std::uint64_t make_key(std::uint64_t seed, std::string_view sample_id,
                                std::int64_t epoch, std::string_view purpose) {
    std::uint64_t h = splitmix64(seed);
    h = fnv1a64(sample_id, h);
    h = splitmix64(h ^ static_cast<std::uint64_t>(epoch));
    h = fnv1a64("\x1f", h);
    h = fnv1a64(purpose, h);
    return splitmix64(h);
  }

  RngStream(std::uint64_t seed, std::string_view sample_id, std::int64_t epoch,
            std::string_view purpose)
      : key_(make_key(seed, sample_id, epoch, purpose)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * (counter_++));
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t draws() const { return counter_; }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection-free multiply-shift; bias < 2^-64 * n.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (one value per call, second discarded).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace texens
