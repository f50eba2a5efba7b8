#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "texens/core/image.hpp"

namespace texens {

/// Circular neighbourhood: P samples at radius R, angle 2*pi*p/P.
struct NeighborhoodConfig {
  double radius = 1.0;
  int points = 8;

  void validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("neighbourhood radius must be > 0");
    if (points != 4 && points != 8 && points != 16)
      throw std::invalid_argument("neighbourhood points must be 4, 8 or 16");
  }
  int border() const { return static_cast<int>(std::ceil(radius - 1e-12)); }
  std::string str() const {
    char buf[48];
    std::snprintf(buf, sizeof buf, "R%g_P%d", radius, points);
    return buf;
  }
};

/// Precomputed bilinear taps for each neighbour. Offsets are snapped to a
/// 1e-12 grid so that symmetric positions get bit-identical weights, and
/// differences are accumulated in sorted order; together this makes codes
/// exact on constant images and exactly equivariant under quarter turns.
class NeighborSampler {
 public:
  explicit NeighborSampler(NeighborhoodConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    taps_.resize(static_cast<std::size_t>(cfg_.points));
    for (int p = 0; p < cfg_.points; ++p) {
      const double theta = 2.0 * std::numbers::pi * p / cfg_.points;
      const double dx = snap(cfg_.radius * std::cos(theta));
      const double dy = snap(-cfg_.radius * std::sin(theta));
      const double fx0 = std::floor(dx), fy0 = std::floor(dy);
      const double fx = dx - fx0, fy = dy - fy0;
      const int ix = static_cast<int>(fx0), iy = static_cast<int>(fy0);
      auto& t = taps_[static_cast<std::size_t>(p)];
      auto add = [&](int ox, int oy, double w) {
        if (w > 0.0) t.push_back({ox, oy, w});
      };
      add(ix, iy, (1.0 - fx) * (1.0 - fy));
      add(ix + 1, iy, fx * (1.0 - fy));
      add(ix, iy + 1, (1.0 - fx) * fy);
      add(ix + 1, iy + 1, fx * fy);
    }
  }

  const NeighborhoodConfig& config() const { return cfg_; }
  int points() const { return cfg_.points; }
  int border() const { return cfg_.border(); }

  /// q_p - q_c for neighbour p around (x, y); (x, y) must be >= border() from every edge.
  double difference(const GrayImage& img, int x, int y, int p) const {
    const double c = img(x, y);
    std::array<double, 4> terms{};
    std::size_t n = 0;
    for (const auto& tap : taps_[static_cast<std::size_t>(p)])
      terms[n++] = tap.w * (img(x + tap.dx, y + tap.dy) - c);
    std::sort(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(n));
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += terms[i];
    return s;
  }

 private:
  struct Tap {
    int dx, dy;
    double w;
  };
  static double snap(double v) { return std::round(v * 1e12) / 1e12; }

  NeighborhoodConfig cfg_;
  std::vector<std::vector<Tap>> taps_;
};

/// Neighbour differences for every interior pixel: P values per pixel,
/// interior = image minus border() on each side, row-major.
struct DifferenceField {
  int width = 0;
  int height = 0;
  int points = 0;
  int border = 0;
  std::vector<double> centers;  // q_c per interior pixel
  std::vector<double> diffs;    // q_p - q_c, pixel-major

  std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
  const double* at(std::size_t pixel) const { return diffs.data() + pixel * points; }
};

inline DifferenceField difference_field(const GrayImage& img, NeighborhoodConfig cfg) {
  NeighborSampler sampler(cfg);
  const int b = sampler.border();
  if (img.width() <= 2 * b || img.height() <= 2 * b)
    throw std::invalid_argument("image too small for neighbourhood " + cfg.str());
  DifferenceField f;
  f.width = img.width() - 2 * b;
  f.height = img.height() - 2 * b;
  f.points = cfg.points;
  f.border = b;
  f.centers.reserve(f.pixels());
  f.diffs.reserve(f.pixels() * static_cast<std::size_t>(cfg.points));
  for (int y = b; y < img.height() - b; ++y)
    for (int x = b; x < img.width() - b; ++x) {
      f.centers.push_back(img(x, y));
      for (int p = 0; p < cfg.points; ++p) f.diffs.push_back(sampler.difference(img, x, y, p));
    }
  return f;
}

}  // namespace texens
