#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "texens/descriptors/feature.hpp"
#include "texens/descriptors/lbp.hpp"

namespace texens {

struct RicConfig {
  std::vector<double> radii{1.0, 2.0, 4.0};
  double interval_factor = 2.0;  // pair interval r = factor * radius

  std::string str() const {
    std::string s;
    for (double r : radii) s += (s.empty() ? "R" : "_R") + std::to_string(static_cast<int>(r));
    return s + "_int" + std::to_string(static_cast<int>(interval_factor)) + "xR";
  }
};

inline std::uint8_t rotl8(std::uint8_t v, int k) {
  k &= 7;
  return static_cast<std::uint8_t>((v << k) | (v >> ((8 - k) & 7)));
}

/// Equivalence classes of ordered 8-bit code pairs. Pairs are identified
/// under simultaneous rotation of both codes and, when `with_reversal`,
/// also under (A,B) ~ (B,A) (the same pair seen from the opposite
/// displacement). table[(A<<8)|B] is the class index.
struct PairClasses {
  std::vector<std::uint32_t> table;
  std::uint32_t count = 0;
};

inline PairClasses make_pair_classes(bool with_reversal) {
  std::vector<std::uint32_t> canon(65536);
  for (std::uint32_t key = 0; key < 65536; ++key) {
    const auto a = static_cast<std::uint8_t>(key >> 8), b = static_cast<std::uint8_t>(key & 0xff);
    std::uint32_t best = key;
    for (int k = 0; k < 8; ++k) {
      const std::uint32_t ra = rotl8(a, k), rb = rotl8(b, k);
      best = std::min(best, (ra << 8) | rb);
      if (with_reversal) best = std::min(best, (rb << 8) | ra);
    }
    canon[key] = best;
  }
  std::vector<std::uint32_t> reps(canon);
  std::sort(reps.begin(), reps.end());
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
  PairClasses pc;
  pc.count = static_cast<std::uint32_t>(reps.size());
  pc.table.resize(65536);
  for (std::uint32_t key = 0; key < 65536; ++key)
    pc.table[key] = static_cast<std::uint32_t>(
        std::lower_bound(reps.begin(), reps.end(), canon[key]) - reps.begin());
  return pc;
}

inline const PairClasses& ric_pair_classes() {
  static const PairClasses pc = make_pair_classes(true);
  return pc;
}

/// Pair displacements for orientations 0, pi/4, pi/2, 3pi/4, rounded to whole pixels.
inline std::array<std::array<int, 2>, 4> ric_displacements(double interval) {
  std::array<std::array<int, 2>, 4> out{};
  for (int t = 0; t < 4; ++t) {
    const double theta = t * std::numbers::pi / 4.0;
    out[static_cast<std::size_t>(t)] = {static_cast<int>(std::lround(interval * std::cos(theta))),
                                        static_cast<int>(std::lround(-interval * std::sin(theta)))};
  }
  return out;
}

/// Rotation-invariant co-occurrence of LBP(8) pairs, one L1-normalized
/// histogram per radius, concatenated.
inline FeatureVector ric_descriptor(const GrayImage& img, const RicConfig& cfg = {}) {
  const auto& classes = ric_pair_classes();
  FeatureVector fv{{}, "ric", cfg.str(), {}};
  for (double radius : cfg.radii) {
    const double interval = cfg.interval_factor * radius;
    if (!(interval > 0.0)) throw std::invalid_argument("ric: interval must be > 0");
    const CodeMap codes = lbp_codes(img, {radius, 8});
    std::vector<double> h(classes.count, 0.0);
    double total = 0.0;
    for (const auto& d : ric_displacements(interval)) {
      const int dx = d[0], dy = d[1];
      for (int y = std::max(0, -dy); y < std::min(codes.height, codes.height - dy); ++y)
        for (int x = std::max(0, -dx); x < std::min(codes.width, codes.width - dx); ++x) {
          h[classes.table[(codes(x, y) << 8) | codes(x + dx, y + dy)]] += 1.0;
          total += 1.0;
        }
    }
    if (total == 0.0) throw std::invalid_argument("ric: image too small for pair interval");
    for (double& v : h) v /= total;
    append(fv.values, h);
  }
  return fv;
}

}  // namespace texens
