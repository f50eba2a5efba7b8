#pragma once

#include <stdexcept>
#include <vector>

#include "texens/descriptors/feature.hpp"
#include "texens/descriptors/lbp.hpp"

namespace texens {

struct LtpConfig {
  double tau = 3.0;
  std::vector<NeighborhoodConfig> scales{{1.0, 8}, {2.0, 16}};

  std::string str() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "tau%g", tau);
    std::string s = buf;
    for (const auto& c : scales) s += "_" + c.str();
    return s;
  }
};

struct LtpCodes {
  std::vector<std::uint32_t> positive;  // bit p: d_p >= tau
  std::vector<std::uint32_t> negative;  // bit p: d_p < -tau
};

inline LtpCodes ltp_codes(const DifferenceField& f, double tau) {
  LtpCodes out;
  out.positive.reserve(f.pixels());
  out.negative.reserve(f.pixels());
  for (std::size_t i = 0; i < f.pixels(); ++i) {
    const double* d = f.at(i);
    std::uint32_t pos = 0, neg = 0;
    for (int p = 0; p < f.points; ++p) {
      if (d[p] >= tau) pos |= 1u << p;
      else if (d[p] < -tau) neg |= 1u << p;
    }
    out.positive.push_back(pos);
    out.negative.push_back(neg);
  }
  return out;
}

/// Multiscale uniform LTP: per scale, u2 histograms of the positive and the
/// negative binary halves, each L1-normalized; (1,8)+(2,16) gives
/// 59+59+243+243 = 604 values.
inline FeatureVector ltp_descriptor(const GrayImage& img, const LtpConfig& cfg = {}) {
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("ltp: tau must be > 0");
  FeatureVector fv{{}, "ltp", cfg.str(), {}};
  for (const auto& scale : cfg.scales) {
    const auto codes = ltp_codes(difference_field(img, scale), cfg.tau);
    const auto& map = cached_uniform_mapping(scale.points, UniformKind::u2);
    append(fv.values, mapped_histogram(codes.positive, map));
    append(fv.values, mapped_histogram(codes.negative, map));
  }
  return fv;
}

}  // namespace texens
