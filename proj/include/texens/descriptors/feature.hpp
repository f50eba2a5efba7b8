#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace texens {

/// One descriptor output. `descriptor` names the family ("ltp", "mlpq", ...),
/// `config` is a canonical parameter string; together they identify the
/// SVM member the vector feeds.
struct FeatureVector {
  std::vector<double> values;
  std::string descriptor;
  std::string config;
  std::string channel;  // "R", "G", "B" for per-channel extraction, else empty

  std::size_t size() const { return values.size(); }
  /// Member identity (channel excluded): per-channel SVMs of one member are fused first.
  std::string member() const { return config.empty() ? descriptor : descriptor + ":" + config; }
  std::string tag() const { return channel.empty() ? member() : member() + "@" + channel; }
};

/// Counts `codes` (already mapped to bins) into `bins` cells, L1-normalized.
/// An empty code list yields an all-zero histogram.
inline std::vector<double> normalized_histogram(std::span<const std::uint32_t> codes,
                                                std::size_t bins) {
  std::vector<double> h(bins, 0.0);
  for (auto c : codes) h[c] += 1.0;
  if (!codes.empty()) {
    const double inv = 1.0 / static_cast<double>(codes.size());
    for (double& v : h) v *= inv;
  }
  return h;
}

inline void append(std::vector<double>& dst, const std::vector<double>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace texens
