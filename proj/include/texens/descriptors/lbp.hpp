#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "texens/descriptors/sampling.hpp"

namespace texens {

/// LBP codes over the interior region (border of ceil(R) cropped).
struct CodeMap {
  int width = 0;
  int height = 0;
  int points = 0;
  std::vector<std::uint32_t> codes;

  std::uint32_t operator()(int x, int y) const {
    return codes[static_cast<std::size_t>(y) * width + x];
  }
};

/// Bit p is set iff (q_p - q_c) >= threshold.
inline std::uint32_t threshold_code(const double* diffs, int points, double threshold = 0.0) {
  std::uint32_t code = 0;
  for (int p = 0; p < points; ++p)
    if (diffs[p] >= threshold) code |= 1u << p;
  return code;
}

inline CodeMap lbp_codes(const DifferenceField& field) {
  CodeMap m{field.width, field.height, field.points, {}};
  m.codes.reserve(field.pixels());
  for (std::size_t i = 0; i < field.pixels(); ++i)
    m.codes.push_back(threshold_code(field.at(i), field.points));
  return m;
}

inline CodeMap lbp_codes(const GrayImage& img, NeighborhoodConfig cfg) {
  return lbp_codes(difference_field(img, cfg));
}

enum class UniformKind { u2, riu2 };

/// Lookup from raw P-bit code to histogram bin.
struct UniformMapping {
  int points = 0;
  UniformKind kind = UniformKind::u2;
  int bins = 0;
  std::vector<std::uint32_t> table;

  std::uint32_t operator()(std::uint32_t code) const { return table[code]; }
};

/// Number of 0/1 transitions around the circular P-bit pattern.
inline int circular_transitions(std::uint32_t code, int points) {
  const std::uint32_t mask = points == 32 ? ~0u : ((1u << points) - 1u);
  const std::uint32_t rot = ((code >> 1) | (code << (points - 1))) & mask;
  return std::popcount((code ^ rot) & mask);
}

/// u2: each pattern with <= 2 transitions gets its own bin (ascending code
/// order), the rest share the last bin -> P(P-1)+3 bins.
/// riu2: uniform patterns binned by popcount (0..P), the rest in bin P+1.
inline UniformMapping uniform_mapping(int points, UniformKind kind) {
  if (points != 8 && points != 16)
    throw std::invalid_argument("uniform_mapping: P must be 8 or 16");
  UniformMapping m;
  m.points = points;
  m.kind = kind;
  const std::uint32_t n = 1u << points;
  m.table.resize(n);
  if (kind == UniformKind::u2) {
    const std::uint32_t other = static_cast<std::uint32_t>(points * (points - 1) + 2);
    std::uint32_t next = 0;
    for (std::uint32_t c = 0; c < n; ++c)
      m.table[c] = circular_transitions(c, points) <= 2 ? next++ : other;
    m.bins = static_cast<int>(other) + 1;
  } else {
    for (std::uint32_t c = 0; c < n; ++c)
      m.table[c] = circular_transitions(c, points) <= 2
                       ? static_cast<std::uint32_t>(std::popcount(c))
                       : static_cast<std::uint32_t>(points + 1);
    m.bins = points + 2;
  }
  return m;
}

/// Cached tables; building the P=16 table costs 65536 popcounts.
inline const UniformMapping& cached_uniform_mapping(int points, UniformKind kind) {
  static const UniformMapping u8 = uniform_mapping(8, UniformKind::u2);
  static const UniformMapping r8 = uniform_mapping(8, UniformKind::riu2);
  static const UniformMapping u16 = uniform_mapping(16, UniformKind::u2);
  static const UniformMapping r16 = uniform_mapping(16, UniformKind::riu2);
  if (points == 8) return kind == UniformKind::u2 ? u8 : r8;
  if (points == 16) return kind == UniformKind::u2 ? u16 : r16;
  throw std::invalid_argument("uniform_mapping: P must be 8 or 16");
}

/// Maps codes through `m` and returns the L1-normalized histogram.
inline std::vector<double> mapped_histogram(const std::vector<std::uint32_t>& codes,
                                            const UniformMapping& m) {
  std::vector<double> h(static_cast<std::size_t>(m.bins), 0.0);
  for (auto c : codes) h[m(c)] += 1.0;
  if (!codes.empty())
    for (double& v : h) v /= static_cast<double>(codes.size());
  return h;
}

}  // namespace texens
