#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "texens/descriptors/feature.hpp"
#include "texens/descriptors/lbp.hpp"

namespace texens {

struct AhpConfig {
  int levels = 5;  // quantization level n
  std::vector<NeighborhoodConfig> scales{{1.0, 8}, {2.0, 16}};

  std::string str() const {
    std::string s = "n" + std::to_string(levels);
    for (const auto& c : scales) s += "_" + c.str();
    return s;
  }
};

/// Gaussian-quantile thresholds sqrt(2)*erfinv((2i-n)/n)*sigma, i = 1..n-1.
inline std::vector<double> ahp_global_thresholds(int levels, double sigma) {
  std::vector<double> t;
  for (int i = 1; i < levels; ++i) {
    const double q = static_cast<double>(2 * i - levels) / levels;
    t.push_back(std::numbers::sqrt2 * boost::math::erf_inv(q) * sigma);
  }
  return t;
}

/// Laplace-quantile thresholds, i = 1..n-1:
///   i < n/2:  (sqrt2/2) ln(2i/n) sigma
///   i > n/2: -(sqrt2/2) ln((2n-2i)/n) sigma
/// (i == n/2 gives 0).
inline std::vector<double> ahp_local_thresholds(int levels, double sigma) {
  std::vector<double> t;
  const double half = std::numbers::sqrt2 / 2.0;
  for (int i = 1; i < levels; ++i) {
    if (2 * i < levels)
      t.push_back(half * std::log(2.0 * i / levels) * sigma);
    else if (2 * i > levels)
      t.push_back(-half * std::log((2.0 * levels - 2.0 * i) / levels) * sigma);
    else
      t.push_back(0.0);
  }
  return t;
}

/// Adaptive hybrid patterns. Per scale, 3(n-1) binary maps: global maps
/// compare neighbours to the image mean shifted by the Gaussian thresholds,
/// local maps compare neighbours to the centre shifted by Laplace thresholds
/// scaled by the local neighbour std (sigma_L) and by the image std (sigma_G).
/// Each map is u2-histogrammed and L1-normalized.
inline FeatureVector ahp_descriptor(const GrayImage& img, const AhpConfig& cfg = {}) {
  if (cfg.levels < 2) throw std::invalid_argument("ahp: levels must be >= 2");
  FeatureVector fv{{}, "ahp", cfg.str(), {}};
  const double mu = img.mean();
  const double sigma_img = img.stddev();
  const auto thr_g = ahp_global_thresholds(cfg.levels, sigma_img);
  const auto thr_lg = ahp_local_thresholds(cfg.levels, sigma_img);
  const auto unit_l = ahp_local_thresholds(cfg.levels, 1.0);
  const std::size_t m = thr_g.size();

  for (const auto& scale : cfg.scales) {
    const auto f = difference_field(img, scale);
    const auto& u2 = cached_uniform_mapping(scale.points, UniformKind::u2);
    std::vector<std::vector<std::uint32_t>> maps(3 * m);
    for (auto& v : maps) v.reserve(f.pixels());
    for (std::size_t px = 0; px < f.pixels(); ++px) {
      const double* d = f.at(px);
      double dm = 0.0;
      for (int p = 0; p < f.points; ++p) dm += d[p];
      dm /= f.points;
      double var = 0.0;
      for (int p = 0; p < f.points; ++p) var += (d[p] - dm) * (d[p] - dm);
      const double sigma_local = std::sqrt(var / f.points);
      const double offset = f.centers[px] - mu;  // q_p - mu = offset + d_p
      for (std::size_t i = 0; i < m; ++i) {
        std::uint32_t g = 0, ll = 0, lg = 0;
        const double tl = unit_l[i] * sigma_local;
        for (int p = 0; p < f.points; ++p) {
          if (offset + d[p] - thr_g[i] >= 0.0) g |= 1u << p;
          if (d[p] - tl >= 0.0) ll |= 1u << p;
          if (d[p] - thr_lg[i] >= 0.0) lg |= 1u << p;
        }
        maps[i].push_back(g);
        maps[m + i].push_back(ll);
        maps[2 * m + i].push_back(lg);
      }
    }
    for (const auto& codes : maps) append(fv.values, mapped_histogram(codes, u2));
  }
  return fv;
}

}  // namespace texens
