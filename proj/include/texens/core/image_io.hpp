#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "texens/core/error.hpp"
#include "texens/core/image.hpp"

namespace texens {

/// Decodes PNG/TIFF/JPEG/BMP into an RGB ColorImage with values in [0,255].
/// 16-bit data is rescaled linearly (v*255/65535); alpha is dropped; a
/// single-channel file is replicated into three identical planes.
inline ColorImage read_image(const std::filesystem::path& path) {
  cv::Mat raw;
  try {
    raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw DataError("cannot decode image '" + path.string() + "': " + e.what());
  }
  if (raw.empty()) throw DataError("cannot decode image '" + path.string() + "'");

  double scale = 1.0;
  switch (raw.depth()) {
    case CV_8U: break;
    case CV_16U: scale = 255.0 / 65535.0; break;
    case CV_32F:
    case CV_64F: break;
    default: throw DataError("unsupported bit depth in '" + path.string() + "'");
  }
  cv::Mat f;
  raw.convertTo(f, CV_64F, scale);

  std::vector<cv::Mat> ch;
  cv::split(f, ch);
  const int w = f.cols, h = f.rows;
  auto plane = [&](const cv::Mat& m) {
    GrayImage g(w, h);
    for (int y = 0; y < h; ++y) {
      const double* row = m.ptr<double>(y);
      for (int x = 0; x < w; ++x) g(x, y) = std::clamp(row[x], 0.0, 255.0);
    }
    return g;
  };
  if (ch.size() == 1 || ch.size() == 2) return ColorImage::from_gray(plane(ch[0]));
  // OpenCV stores BGR(A).
  return {plane(ch[2]), plane(ch[1]), plane(ch[0]), ColorSpace::rgb};
}

namespace detail {
inline unsigned char to_byte(double v) {
  return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L));
}
}  // namespace detail

inline void write_png(const std::filesystem::path& path, const GrayImage& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC1);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) m.at<unsigned char>(y, x) = detail::to_byte(img(x, y));
  if (!cv::imwrite(path.string(), m)) throw DataError("cannot write '" + path.string() + "'");
}

/// Writes an 8-bit PNG; grayscale content is written as one channel.
inline void write_png(const std::filesystem::path& path, const ColorImage& img) {
  if (img.is_grayscale()) return write_png(path, img.planes[0]);
  cv::Mat m(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      auto& px = m.at<cv::Vec3b>(y, x);
      px[0] = detail::to_byte(img.planes[2](x, y));
      px[1] = detail::to_byte(img.planes[1](x, y));
      px[2] = detail::to_byte(img.planes[0](x, y));
    }
  if (!cv::imwrite(path.string(), m)) throw DataError("cannot write '" + path.string() + "'");
}

}  // namespace texens
