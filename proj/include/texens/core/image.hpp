#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace texens {

/// Single intensity plane, row-major, values nominally in [0,255].
class GrayImage {
 public:
  GrayImage() = default;

  GrayImage(int width, int height, double fill = 0.0)
      : width_(width), height_(height),
        data_(checked_area(width, height), fill) {}

  /// Validating constructor: size must match and every value must be a
  /// finite intensity in [0,255].
  GrayImage(int width, int height, std::vector<double> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_area(width, height))
      throw std::invalid_argument("GrayImage: data length != width*height");
    for (double v : data_)
      if (!std::isfinite(v) || v < 0.0 || v > 255.0)
        throw std::invalid_argument("GrayImage: value outside [0,255]");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double operator()(int x, int y) const { return data_[index(x, y)]; }
  double& operator()(int x, int y) { return data_[index(x, y)]; }

  std::span<const double> pixels() const { return data_; }
  std::span<double> pixels() { return data_; }

  double mean() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return data_.empty() ? 0.0 : s / static_cast<double>(data_.size());
  }

  /// Population standard deviation.
  double stddev() const {
    if (data_.empty()) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double v : data_) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(data_.size()));
  }

  void clamp(double lo = 0.0, double hi = 255.0) {
    for (double& v : data_) v = std::clamp(v, lo, hi);
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  static std::size_t checked_area(int w, int h) {
    if (w < 0 || h < 0) throw std::invalid_argument("GrayImage: negative dimension");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

enum class ColorSpace { rgb, hsv, lab };

inline const char* to_string(ColorSpace cs) {
  switch (cs) {
    case ColorSpace::rgb: return "RGB";
    case ColorSpace::hsv: return "HSV";
    case ColorSpace::lab: return "CIELab";
  }
  return "?";
}

/// Three equally sized planes plus a colorspace tag.
struct ColorImage {
  std::array<GrayImage, 3> planes;
  ColorSpace space = ColorSpace::rgb;

  ColorImage() = default;
  ColorImage(GrayImage c0, GrayImage c1, GrayImage c2, ColorSpace cs = ColorSpace::rgb)
      : planes{std::move(c0), std::move(c1), std::move(c2)}, space(cs) {
    for (const auto& p : planes)
      if (p.width() != planes[0].width() || p.height() != planes[0].height())
        throw std::invalid_argument("ColorImage: planes differ in size");
  }

  /// Replicates a gray plane into three RGB planes.
  static ColorImage from_gray(const GrayImage& g) { return {g, g, g, ColorSpace::rgb}; }

  int width() const { return planes[0].width(); }
  int height() const { return planes[0].height(); }

  /// True when all three planes are identical (a grayscale file).
  bool is_grayscale() const { return planes[0] == planes[1] && planes[0] == planes[2]; }

  friend bool operator==(const ColorImage&, const ColorImage&) = default;
};

/// Rec. 601 luma.
inline GrayImage to_gray(const ColorImage& img) {
  if (img.space != ColorSpace::rgb) throw std::invalid_argument("to_gray: input must be RGB");
  GrayImage out(img.width(), img.height());
  auto r = img.planes[0].pixels(), g = img.planes[1].pixels(), b = img.planes[2].pixels();
  auto o = out.pixels();
  for (std::size_t i = 0; i < o.size(); ++i)
    o[i] = std::clamp(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i], 0.0, 255.0);
  return out;
}

namespace detail {

// HSV with H in degrees [0,360), S and V in [0,1]; input RGB in [0,1].
inline std::array<double, 3> rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  double h = 0.0;
  if (d > 0.0) {
    if (mx == r) h = 60.0 * std::fmod((g - b) / d, 6.0);
    else if (mx == g) h = 60.0 * ((b - r) / d + 2.0);
    else h = 60.0 * ((r - g) / d + 4.0);
    if (h < 0.0) h += 360.0;
  }
  const double s = mx > 0.0 ? d / mx : 0.0;
  return {h, s, mx};
}

inline double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

// CIE L*a*b* under D65; input sRGB in [0,1].
inline std::array<double, 3> rgb_to_lab(double r, double g, double b) {
  r = srgb_to_linear(r);
  g = srgb_to_linear(g);
  b = srgb_to_linear(b);
  const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
  const double y = (0.2126729 * r + 0.7151522 * g + 0.0721750 * b) / 1.00000;
  const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
  auto f = [](double t) {
    constexpr double eps = 216.0 / 24389.0;
    constexpr double kappa = 24389.0 / 27.0;
    return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
  };
  const double fx = f(x), fy = f(y), fz = f(z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

}  // namespace detail

/// RGB -> HSV or CIELab, every output channel rescaled to [0,255]:
/// H*255/360, S*255, V*255; L*255/100, a+128, b+128 (clamped).
inline ColorImage convert_colorspace(const ColorImage& img, ColorSpace target) {
  if (img.space != ColorSpace::rgb)
    throw std::invalid_argument("convert_colorspace: input must be RGB");
  if (target == ColorSpace::rgb) return img;
  ColorImage out(GrayImage(img.width(), img.height()), GrayImage(img.width(), img.height()),
                 GrayImage(img.width(), img.height()), target);
  auto r = img.planes[0].pixels(), g = img.planes[1].pixels(), b = img.planes[2].pixels();
  auto o0 = out.planes[0].pixels(), o1 = out.planes[1].pixels(), o2 = out.planes[2].pixels();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double rr = r[i] / 255.0, gg = g[i] / 255.0, bb = b[i] / 255.0;
    if (target == ColorSpace::hsv) {
      auto [h, s, v] = detail::rgb_to_hsv(rr, gg, bb);
      o0[i] = h * 255.0 / 360.0;
      o1[i] = s * 255.0;
      o2[i] = v * 255.0;
    } else {
      auto [l, a, bl] = detail::rgb_to_lab(rr, gg, bb);
      o0[i] = std::clamp(l * 255.0 / 100.0, 0.0, 255.0);
      o1[i] = std::clamp(a + 128.0, 0.0, 255.0);
      o2[i] = std::clamp(bl + 128.0, 0.0, 255.0);
    }
  }
  return out;
}

/// Bilinear resize with corner pixel centres aligned
/// (source coordinate = dest * (in-1)/(out-1)).
inline GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1)
    throw std::invalid_argument("resize_bilinear: zero dimension");
  if (img.empty()) throw std::invalid_argument("resize_bilinear: empty input");
  if (new_width == img.width() && new_height == img.height()) return img;
  GrayImage out(new_width, new_height);
  auto coord = [](int i, int in, int outn) {
    if (outn == 1) return 0.5 * (in - 1);
    return static_cast<double>(i) * (in - 1) / static_cast<double>(outn - 1);
  };
  auto lerp = [](double a, double b, double t) {
    return std::clamp(a + t * (b - a), std::min(a, b), std::max(a, b));
  };
  for (int y = 0; y < new_height; ++y) {
    const double sy = coord(y, img.height(), new_height);
    const int y0 = std::min(static_cast<int>(std::floor(sy)), img.height() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fy = sy - y0;
    for (int x = 0; x < new_width; ++x) {
      const double sx = coord(x, img.width(), new_width);
      const int x0 = std::min(static_cast<int>(std::floor(sx)), img.width() - 1);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double fx = sx - x0;
      const double top = lerp(img(x0, y0), img(x1, y0), fx);
      const double bot = lerp(img(x0, y1), img(x1, y1), fx);
      out(x, y) = lerp(top, bot, fy);
    }
  }
  return out;
}

inline ColorImage resize_bilinear(const ColorImage& img, int new_width, int new_height) {
  return {resize_bilinear(img.planes[0], new_width, new_height),
          resize_bilinear(img.planes[1], new_width, new_height),
          resize_bilinear(img.planes[2], new_width, new_height), img.space};
}

/// Rotates by 90 degrees counter-clockwise `quarter_turns` times.
inline GrayImage rotate90(const GrayImage& img, int quarter_turns = 1) {
  quarter_turns = ((quarter_turns % 4) + 4) % 4;
  GrayImage cur = img;
  for (int t = 0; t < quarter_turns; ++t) {
    GrayImage next(cur.height(), cur.width());
    for (int y = 0; y < cur.height(); ++y)
      for (int x = 0; x < cur.width(); ++x) next(y, cur.width() - 1 - x) = cur(x, y);
    cur = std::move(next);
  }
  return cur;
}

inline GrayImage flip_lr(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out(img.width() - 1 - x, y) = img(x, y);
  return out;
}

inline GrayImage flip_tb(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out(x, img.height() - 1 - y) = img(x, y);
  return out;
}

}  // namespace texens
