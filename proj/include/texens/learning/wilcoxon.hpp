#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace texens {

struct WilcoxonResult {
  double statistic = 0.0;  // min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0;    // two-sided
  std::size_t n = 0;       // nonzero differences
  bool exact = true;
  std::vector<std::string> warnings;
};

/// Average ranks of `v` (1-based), ties sharing the mean rank.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

/// Two-sided signed-rank test on paired samples. Zero differences are
/// dropped. n <= 12: exact null distribution of W+ over all 2^n sign
/// patterns (counted on doubled ranks, so tied half-ranks stay integral).
/// Larger n: normal approximation with tie-corrected variance and a 0.5
/// continuity correction.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                           const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("wilcoxon: length mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  std::vector<double> d, mag;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i] - b[i];
    if (!std::isfinite(x)) throw std::invalid_argument("wilcoxon: non-finite input");
    if (x != 0.0) {
      d.push_back(x);
      mag.push_back(std::fabs(x));
    }
  }
  WilcoxonResult res;
  res.n = d.size();
  if (d.empty()) {
    res.warnings.push_back("all differences are zero; p = 1");
    return res;
  }
  if (res.n < 5) res.warnings.push_back("fewer than 5 nonzero differences");

  const auto ranks = average_ranks(mag);
  for (std::size_t i = 0; i < d.size(); ++i) (d[i] > 0 ? res.w_plus : res.w_minus) += ranks[i];
  res.statistic = std::min(res.w_plus, res.w_minus);

  if (res.n <= 12) {
    std::vector<int> r2(res.n);
    for (std::size_t i = 0; i < res.n; ++i) r2[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
    const int total = std::accumulate(r2.begin(), r2.end(), 0);
    std::vector<std::uint64_t> count(static_cast<std::size_t>(total) + 1, 0);
    count[0] = 1;
    for (int r : r2)
      for (int s = total; s >= r; --s) count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r)];
    const int w = static_cast<int>(std::lround(2.0 * res.w_plus));
    std::uint64_t le = 0, ge = 0;
    for (int s = 0; s <= total; ++s) {
      if (s <= w) le += count[static_cast<std::size_t>(s)];
      if (s >= w) ge += count[static_cast<std::size_t>(s)];
    }
    const double denom = std::ldexp(1.0, static_cast<int>(res.n));
    res.p_value = std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / denom);
    return res;
  }

  res.exact = false;
  const double n = static_cast<double>(res.n);
  const double mean = n * (n + 1.0) / 4.0;
  double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  std::vector<double> sorted = mag;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    var -= (t * t * t - t) / 48.0;
    i = j + 1;
  }
  if (var <= 0) {
    res.p_value = 1.0;
    return res;
  }
  const double z = std::max(0.0, std::fabs(res.w_plus - mean) - 0.5) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

}  // namespace texens
