#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "texens/core/image.hpp"
#include "texens/descriptors/feature.hpp"

namespace texens {

/// Otsu threshold over the 256-level histogram of rounded intensities;
/// foreground is value > threshold. Ties pick the lowest threshold.
/// Returns -1 for single-level images (no foreground).
inline int otsu_threshold(const GrayImage& img) {
  std::array<double, 256> hist{};
  for (double v : img.pixels()) hist[static_cast<std::size_t>(std::clamp(std::lround(v), 0L, 255L))] += 1.0;
  int levels = 0;
  for (double h : hist) levels += h > 0.0;
  if (levels < 2) return -1;
  const double total = static_cast<double>(img.size());
  double sum_all = 0.0;
  for (int i = 0; i < 256; ++i) sum_all += i * hist[static_cast<std::size_t>(i)];
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int best_t = 0;
  for (int t = 0; t < 255; ++t) {
    w0 += hist[static_cast<std::size_t>(t)];
    sum0 += t * hist[static_cast<std::size_t>(t)];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best * (1.0 + 1e-12)) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

struct RegionStats {
  double area = 0.0;
  double perimeter = 0.0;
  double eccentricity = 0.0;
  double aspect = 0.0;
  double solidity = 0.0;
  double extent = 0.0;
};

namespace detail {

inline double cross(std::pair<int, int> o, std::pair<int, int> a, std::pair<int, int> b) {
  return static_cast<double>(a.first - o.first) * (b.second - o.second) -
         static_cast<double>(a.second - o.second) * (b.first - o.first);
}

// Area of the convex hull of the pixel squares' corner points.
inline double hull_area(const std::vector<std::pair<int, int>>& pixels) {
  std::vector<std::pair<int, int>> pts;
  pts.reserve(pixels.size() * 4);
  for (auto [x, y] : pixels) {
    pts.emplace_back(x, y);
    pts.emplace_back(x + 1, y);
    pts.emplace_back(x, y + 1);
    pts.emplace_back(x + 1, y + 1);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return 0.0;
  std::vector<std::pair<int, int>> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double a = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& p = hull[i];
    const auto& q = hull[(i + 1) % hull.size()];
    a += static_cast<double>(p.first) * q.second - static_cast<double>(q.first) * p.second;
  }
  return std::abs(a) / 2.0;
}

}  // namespace detail

/// 8-connected components of `mask` with their shape statistics.
inline std::vector<RegionStats> region_stats(const std::vector<std::uint8_t>& mask, int width,
                                             int height) {
  std::vector<int> label(mask.size(), -1);
  std::vector<RegionStats> out;
  auto at = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < width && y < height &&
           mask[static_cast<std::size_t>(y) * width + x];
  };
  for (int sy = 0; sy < height; ++sy)
    for (int sx = 0; sx < width; ++sx) {
      const std::size_t s = static_cast<std::size_t>(sy) * width + sx;
      if (!mask[s] || label[s] >= 0) continue;
      const int id = static_cast<int>(out.size());
      std::vector<std::pair<int, int>> pixels{{sx, sy}};
      label[s] = id;
      for (std::size_t head = 0; head < pixels.size(); ++head) {
        const auto [x, y] = pixels[head];
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (!at(nx, ny)) continue;
            auto& l = label[static_cast<std::size_t>(ny) * width + nx];
            if (l < 0) {
              l = id;
              pixels.emplace_back(nx, ny);
            }
          }
      }
      RegionStats r;
      r.area = static_cast<double>(pixels.size());
      int x0 = width, x1 = -1, y0 = height, y1 = -1;
      double mx = 0.0, my = 0.0;
      for (auto [x, y] : pixels) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
        mx += x;
        my += y;
        if (!at(x - 1, y) || !at(x + 1, y) || !at(x, y - 1) || !at(x, y + 1)) r.perimeter += 1.0;
      }
      mx /= r.area;
      my /= r.area;
      double cxx = 0.0, cyy = 0.0, cxy = 0.0;
      for (auto [x, y] : pixels) {
        cxx += (x - mx) * (x - mx);
        cyy += (y - my) * (y - my);
        cxy += (x - mx) * (y - my);
      }
      cxx /= r.area;
      cyy /= r.area;
      cxy /= r.area;
      const double tr = cxx + cyy;
      const double disc = std::sqrt(std::max(0.0, (cxx - cyy) * (cxx - cyy) / 4.0 + cxy * cxy));
      const double l1 = tr / 2.0 + disc, l2 = std::max(0.0, tr / 2.0 - disc);
      r.eccentricity = l1 > 0.0 ? std::sqrt(std::max(0.0, 1.0 - l2 / l1)) : 0.0;
      const double bw = x1 - x0 + 1, bh = y1 - y0 + 1;
      r.aspect = bw / bh;
      r.extent = r.area / (bw * bh);
      const double hull = detail::hull_area(pixels);
      r.solidity = hull > 0.0 ? r.area / hull : 1.0;
      out.push_back(r);
    }
  return out;
}

/// Morphological features of the Otsu foreground: object count, foreground
/// fraction, mean and std of area, mean perimeter, eccentricity, bbox
/// aspect ratio, solidity and extent. All zeros without foreground.
inline FeatureVector mor_descriptor(const GrayImage& img) {
  FeatureVector fv{std::vector<double>(9, 0.0), "mor", "otsu_8conn", {}};
  const int t = otsu_threshold(img);
  if (t < 0) return fv;
  std::vector<std::uint8_t> mask(img.size());
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) mask[i] = std::lround(px[i]) > t;
  const auto regions = region_stats(mask, img.width(), img.height());
  if (regions.empty()) return fv;
  const double n = static_cast<double>(regions.size());
  double area = 0.0, area2 = 0.0, perim = 0.0, ecc = 0.0, aspect = 0.0, sol = 0.0, ext = 0.0;
  for (const auto& r : regions) {
    area += r.area;
    area2 += r.area * r.area;
    perim += r.perimeter;
    ecc += r.eccentricity;
    aspect += r.aspect;
    sol += r.solidity;
    ext += r.extent;
  }
  const double mean_area = area / n;
  fv.values = {n,
               area / static_cast<double>(img.size()),
               mean_area,
               std::sqrt(std::max(0.0, area2 / n - mean_area * mean_area)),
               perim / n,
               ecc / n,
               aspect / n,
               sol / n,
               ext / n};
  return fv;
}

}  // namespace texens
