#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "texens/core/image.hpp"

namespace texens {

/// Geometric augmentation parameters; defaults are the identity.
struct GeoSpec {
  bool flip_lr = false;
  bool flip_tb = false;
  double scale_x = 1.0, scale_y = 1.0;   // [1,2]
  double rotation_deg = 0.0;             // [-10,10]
  double translate_x = 0.0, translate_y = 0.0;  // [0,5] px
  double shear_x_deg = 0.0, shear_y_deg = 0.0;  // [0,30]

  void validate() const {
    auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
    if (!in(scale_x, 1.0, 2.0) || !in(scale_y, 1.0, 2.0))
      throw std::invalid_argument("GeoSpec: scale outside [1,2]");
    if (!in(rotation_deg, -10.0, 10.0)) throw std::invalid_argument("GeoSpec: rotation outside [-10,10]");
    if (!in(translate_x, 0.0, 5.0) || !in(translate_y, 0.0, 5.0))
      throw std::invalid_argument("GeoSpec: translation outside [0,5]");
    if (!in(shear_x_deg, 0.0, 30.0) || !in(shear_y_deg, 0.0, 30.0))
      throw std::invalid_argument("GeoSpec: shear outside [0,30]");
  }

  bool continuous_identity() const {
    return scale_x == 1.0 && scale_y == 1.0 && rotation_deg == 0.0 && translate_x == 0.0 &&
           translate_y == 0.0 && shear_x_deg == 0.0 && shear_y_deg == 0.0;
  }
};

/// Bilinear sample with zero outside the image.
inline double sample_zero_fill(const GrayImage& img, double x, double y) {
  const double fx0 = std::floor(x), fy0 = std::floor(y);
  const double fx = x - fx0, fy = y - fy0;
  const int ix = static_cast<int>(fx0), iy = static_cast<int>(fy0);
  auto px = [&](int xx, int yy) {
    return xx >= 0 && yy >= 0 && xx < img.width() && yy < img.height() ? img(xx, yy) : 0.0;
  };
  double v = 0.0;
  if ((1.0 - fx) * (1.0 - fy) > 0.0) v += (1.0 - fx) * (1.0 - fy) * px(ix, iy);
  if (fx * (1.0 - fy) > 0.0) v += fx * (1.0 - fy) * px(ix + 1, iy);
  if ((1.0 - fx) * fy > 0.0) v += (1.0 - fx) * fy * px(ix, iy + 1);
  if (fx * fy > 0.0) v += fx * fy * px(ix + 1, iy + 1);
  return v;
}

/// flip -> scale about the centre (equivalent to upscale + centre crop)
/// -> rotate about the centre -> translate -> shear; output keeps the input
/// size, uncovered pixels are 0.
inline GrayImage geometric_transform(const GrayImage& img, const GeoSpec& spec) {
  spec.validate();
  GrayImage src = img;
  if (spec.flip_lr) src = flip_lr(src);
  if (spec.flip_tb) src = flip_tb(src);
  if (spec.continuous_identity()) return src;

  const double cx = 0.5 * (src.width() - 1), cy = 0.5 * (src.height() - 1);
  const double th = spec.rotation_deg * std::numbers::pi / 180.0;
  const double ct = std::cos(th), st = std::sin(th);
  const double a = std::tan(spec.shear_x_deg * std::numbers::pi / 180.0);
  const double b = std::tan(spec.shear_y_deg * std::numbers::pi / 180.0);
  const double det = 1.0 - a * b;

  GrayImage out(src.width(), src.height());
  for (int yo = 0; yo < src.height(); ++yo)
    for (int xo = 0; xo < src.width(); ++xo) {
      // Inverse shear.
      double u = xo - cx, v = yo - cy;
      double x = (u - a * v) / det, y = (v - b * u) / det;
      // Inverse translation.
      x -= spec.translate_x;
      y -= spec.translate_y;
      // Inverse rotation.
      const double xr = ct * x + st * y, yr = -st * x + ct * y;
      // Inverse scale.
      out(xo, yo) = sample_zero_fill(src, cx + xr / spec.scale_x, cy + yr / spec.scale_y);
    }
  return out;
}

inline ColorImage geometric_transform(const ColorImage& img, const GeoSpec& spec) {
  return {geometric_transform(img.planes[0], spec), geometric_transform(img.planes[1], spec),
          geometric_transform(img.planes[2], spec), img.space};
}

}  // namespace texens
