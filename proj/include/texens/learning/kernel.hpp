#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace texens {

enum class KernelKind { intersection, linear, rbf };

inline std::string_view kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::intersection: return "hi";
    case KernelKind::linear: return "linear";
    case KernelKind::rbf: return "rbf";
  }
  return "?";
}

inline KernelKind parse_kernel(std::string_view s) {
  if (s == "hi" || s == "intersection") return KernelKind::intersection;
  if (s == "linear") return KernelKind::linear;
  if (s == "rbf") return KernelKind::rbf;
  throw std::invalid_argument("unknown kernel '" + std::string(s) + "' (valid: hi, linear, rbf)");
}

struct Kernel {
  KernelKind kind = KernelKind::intersection;
  double gamma = 0.0;  // rbf only; <= 0 means 1/dim

  double operator()(const double* a, const double* b, std::size_t d) const {
    double s = 0.0;
    switch (kind) {
      case KernelKind::intersection:
        for (std::size_t i = 0; i < d; ++i) s += std::min(a[i], b[i]);
        return s;
      case KernelKind::linear:
        for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
        return s;
      case KernelKind::rbf: {
        for (std::size_t i = 0; i < d; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        const double g = gamma > 0 ? gamma : 1.0 / static_cast<double>(std::max<std::size_t>(d, 1));
        return std::exp(-g * s);
      }
    }
    return 0.0;
  }

  std::string str() const {
    std::string s(kernel_name(kind));
    if (kind == KernelKind::rbf && gamma > 0) s += ":" + std::to_string(gamma);
    return s;
  }
};

}  // namespace texens
