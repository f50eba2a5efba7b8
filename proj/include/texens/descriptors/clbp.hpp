#pragma once

#include <cmath>
#include <vector>

#include "texens/descriptors/feature.hpp"
#include "texens/descriptors/lbp.hpp"

namespace texens {

/// Per-pixel CLBP components for one neighbourhood.
struct ClbpMaps {
  std::vector<std::uint32_t> sign;       // CLBP_S raw codes
  std::vector<std::uint32_t> magnitude;  // CLBP_M raw codes
  std::vector<std::uint8_t> center;      // CLBP_C bit
  double mean_magnitude = 0.0;           // c, mean of all m_p
};

inline ClbpMaps clbp_maps(const DifferenceField& f, double image_mean) {
  ClbpMaps m;
  double sum = 0.0;
  for (double d : f.diffs) sum += std::abs(d);
  m.mean_magnitude = f.diffs.empty() ? 0.0 : sum / static_cast<double>(f.diffs.size());
  m.sign.reserve(f.pixels());
  m.magnitude.reserve(f.pixels());
  m.center.reserve(f.pixels());
  for (std::size_t i = 0; i < f.pixels(); ++i) {
    const double* d = f.at(i);
    std::uint32_t s = 0, mag = 0;
    for (int p = 0; p < f.points; ++p) {
      if (d[p] >= 0.0) s |= 1u << p;
      if (std::abs(d[p]) >= m.mean_magnitude) mag |= 1u << p;
    }
    m.sign.push_back(s);
    m.magnitude.push_back(mag);
    m.center.push_back(f.centers[i] >= image_mean ? 1 : 0);
  }
  return m;
}

/// Joint S/M/C histogram (riu2 on S and M), (P+2)^2*2 cells per scale,
/// L1-normalized per scale. (1,8)+(2,16) gives 200+648 = 848 values.
inline FeatureVector clbp_descriptor(
    const GrayImage& img,
    const std::vector<NeighborhoodConfig>& scales = {{1.0, 8}, {2.0, 16}}) {
  FeatureVector fv{{}, "clbp", {}, {}};
  const double mu = img.mean();
  for (const auto& scale : scales) {
    fv.config += (fv.config.empty() ? "" : "_") + scale.str();
    const auto f = difference_field(img, scale);
    const auto maps = clbp_maps(f, mu);
    const auto& riu2 = cached_uniform_mapping(scale.points, UniformKind::riu2);
    const std::size_t nb = static_cast<std::size_t>(riu2.bins);
    std::vector<double> h(nb * nb * 2, 0.0);
    for (std::size_t i = 0; i < f.pixels(); ++i)
      h[(riu2(maps.sign[i]) * nb + riu2(maps.magnitude[i])) * 2 + maps.center[i]] += 1.0;
    for (double& v : h) v /= static_cast<double>(f.pixels());
    append(fv.values, h);
  }
  return fv;
}

}  // namespace texens
