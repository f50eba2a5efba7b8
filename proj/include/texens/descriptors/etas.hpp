#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <vector>

#include "texens/core/image.hpp"
#include "texens/descriptors/feature.hpp"

namespace texens {

struct IntensityRange {
  double low;
  double high;
};

/// The seven ranges E1..E7 around the image mean, clamped to [0,255].
inline std::array<IntensityRange, 7> etas_ranges(double mu, double tau) {
  auto c = [](double v) { return std::clamp(v, 0.0, 255.0); };
  std::array<IntensityRange, 7> e{{
      {mu, 255.0},
      {mu - tau, 255.0},
      {mu - tau, mu + tau},
      {mu, 255.0 - tau},
      {mu - tau, 255.0 - tau},
      {mu + tau, 255.0 - tau},
      {mu + tau, 255.0},
  }};
  for (auto& r : e) {
    r.low = c(r.low);
    r.high = c(r.high);
  }
  return e;
}

/// Threshold adjacency statistics of a binary mask: over interior pixels
/// that are set, the fraction with exactly k set 8-neighbours, k = 0..8.
/// All zeros when no interior pixel is set.
inline std::array<double, 9> tas_statistics(const std::vector<std::uint8_t>& mask, int width,
                                            int height) {
  std::array<double, 9> h{};
  double total = 0.0;
  for (int y = 1; y + 1 < height; ++y)
    for (int x = 1; x + 1 < width; ++x) {
      if (!mask[static_cast<std::size_t>(y) * width + x]) continue;
      int k = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if ((dx || dy) && mask[static_cast<std::size_t>(y + dy) * width + (x + dx)]) ++k;
      h[static_cast<std::size_t>(k)] += 1.0;
      total += 1.0;
    }
  if (total > 0.0)
    for (double& v : h) v /= total;
  return h;
}

/// Extended TAS: one 9-value TAS block per range E1..E7 (63 values).
inline FeatureVector etas_descriptor(const GrayImage& img, double tau = 30.0) {
  char cfg[32];
  std::snprintf(cfg, sizeof cfg, "tau%g", tau);
  FeatureVector fv{{}, "etas", cfg, {}};
  const auto ranges = etas_ranges(img.mean(), tau);
  std::vector<std::uint8_t> mask(img.size());
  for (const auto& r : ranges) {
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) mask[i] = px[i] >= r.low && px[i] <= r.high;
    const auto h = tas_statistics(mask, img.width(), img.height());
    fv.values.insert(fv.values.end(), h.begin(), h.end());
  }
  return fv;
}

}  // namespace texens
