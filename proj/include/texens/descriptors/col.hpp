#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "texens/core/image.hpp"
#include "texens/descriptors/feature.hpp"

namespace texens {

enum class ColStdForm {
  printed,  // (1/(n-1)) * sqrt(sum (I - mu)^2)
  sample,   // sqrt(sum (I - mu)^2 / (n-1))
};

/// Mean, std and third central moment of one channel in [0,1].
inline std::array<double, 3> channel_stats(std::span<const double> values, ColStdForm form) {
  const double n = static_cast<double>(values.size());
  double mu = 0.0;
  for (double v : values) mu += v;
  mu /= n;
  double ss = 0.0, m3 = 0.0;
  for (double v : values) {
    const double d = v - mu;
    ss += d * d;
    m3 += d * d * d;
  }
  double sigma = 0.0;
  if (values.size() > 1)
    sigma = form == ColStdForm::printed ? std::sqrt(ss) / (n - 1.0) : std::sqrt(ss / (n - 1.0));
  return {mu, sigma, m3 / n};
}

/// Soft colour statistics over RGB, HSV and CIELab: per channel mean, std
/// and 3rd moment of intensities scaled to [0,1]. 27 values.
inline FeatureVector col_descriptor(const ColorImage& rgb, ColStdForm form = ColStdForm::printed) {
  if (rgb.space != ColorSpace::rgb) throw std::invalid_argument("col: input must be RGB");
  if (rgb.is_grayscale()) throw std::invalid_argument("COL requires color");
  FeatureVector fv{{}, "col", form == ColStdForm::printed ? "std_printed" : "std_sample", {}};
  for (ColorSpace cs : {ColorSpace::rgb, ColorSpace::hsv, ColorSpace::lab}) {
    const ColorImage img = convert_colorspace(rgb, cs);
    for (const auto& plane : img.planes) {
      std::vector<double> unit(plane.pixels().begin(), plane.pixels().end());
      for (double& v : unit) v /= 255.0;
      const auto s = channel_stats(unit, form);
      fv.values.insert(fv.values.end(), s.begin(), s.end());
    }
  }
  return fv;
}

}  // namespace texens
