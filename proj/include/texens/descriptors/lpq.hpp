#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "texens/core/image.hpp"
#include "texens/descriptors/feature.hpp"

namespace texens {

struct LpqConfig {
  int window = 3;             // w, odd
  double freq_scale = 1.0;    // s, frequency a = s / w
  double rho = 0.9;           // Markov correlation of neighbouring pixels
  double tau = 0.0;           // 0: binary LPQ, > 0: ternary (MLPQ)

  void validate() const {
    if (window < 3 || window % 2 == 0) throw std::invalid_argument("lpq: window must be odd >= 3");
    if (!(freq_scale > 0.0)) throw std::invalid_argument("lpq: frequency scale must be > 0");
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("lpq: rho must be in [0,1)");
    if (!(tau >= 0.0)) throw std::invalid_argument("lpq: tau must be >= 0");
  }
  std::string str() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "w%d_s%g_rho%g_t%g", window, freq_scale, rho, tau);
    return buf;
  }
};

using Matrix8 = Eigen::Matrix<double, 8, 8>;
using Vector8 = Eigen::Matrix<double, 8, 1>;

/// Rows of the 8 x w^2 matrix mapping a window (row-major, y outer) to
/// [Re F1..F4, Im F1..F4] at frequencies (a,0), (0,a), (a,a), (a,-a).
inline Eigen::MatrixXd lpq_filter_matrix(int window, double freq_scale) {
  const int r = (window - 1) / 2;
  const double a = freq_scale / window;
  Eigen::MatrixXd m(8, window * window);
  const std::array<std::array<int, 2>, 4> freqs{{{1, 0}, {0, 1}, {1, 1}, {1, -1}}};
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x) {
      const int col = (y + r) * window + (x + r);
      for (int f = 0; f < 4; ++f) {
        const double phase =
            -2.0 * std::numbers::pi * a * (freqs[static_cast<std::size_t>(f)][0] * x +
                                           freqs[static_cast<std::size_t>(f)][1] * y);
        m(f, col) = std::cos(phase);
        m(4 + f, col) = std::sin(phase);
      }
    }
  return m;
}

/// Symmetric whitening D^{-1/2} of the coefficient covariance
/// D = M C M^T, where C(i,j) = rho^|p_i - p_j| models pixel correlation.
inline Matrix8 lpq_whitening(int window, double freq_scale, double rho) {
  const Eigen::MatrixXd m = lpq_filter_matrix(window, freq_scale);
  const int n = window * window;
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double dx = (i % window) - (j % window), dy = (i / window) - (j / window);
      const double dist = std::sqrt(dx * dx + dy * dy);
      c(i, j) = dist == 0.0 ? 1.0 : std::pow(rho, dist);
    }
  const Matrix8 d = m * c * m.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix8> es(d);
  Vector8 ev = es.eigenvalues();
  const double floor = std::max(ev.maxCoeff(), 1e-300) * 1e-12;
  for (int i = 0; i < 8; ++i) ev(i) = 1.0 / std::sqrt(std::max(ev(i), floor));
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

/// Whitened LPQ coefficients for every interior pixel (window fully inside).
struct LpqCoefficients {
  int width = 0;
  int height = 0;
  std::vector<Vector8> values;
};

inline LpqCoefficients lpq_coefficients(const GrayImage& img, int window, double freq_scale,
                                        double rho) {
  if (window < 3 || window % 2 == 0) throw std::invalid_argument("lpq: window must be odd >= 3");
  if (window > img.width() || window > img.height())
    throw std::invalid_argument("lpq: window larger than image");
  const int r = (window - 1) / 2;
  const double a = freq_scale / window;
  std::vector<std::complex<double>> w1(static_cast<std::size_t>(window));
  for (int x = -r; x <= r; ++x)
    w1[static_cast<std::size_t>(x + r)] = std::polar(1.0, -2.0 * std::numbers::pi * a * x);

  const int W = img.width(), H = img.height();
  const int ow = W - 2 * r, oh = H - 2 * r;
  // Horizontal pass: box sum and complex exponential along x.
  std::vector<double> h0(static_cast<std::size_t>(ow) * H);
  std::vector<std::complex<double>> h1(static_cast<std::size_t>(ow) * H);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < ow; ++x) {
      double s0 = 0.0;
      std::complex<double> s1{};
      for (int k = 0; k < window; ++k) {
        const double v = img(x + k, y);
        s0 += v;
        s1 += v * w1[static_cast<std::size_t>(k)];
      }
      h0[static_cast<std::size_t>(y) * ow + x] = s0;
      h1[static_cast<std::size_t>(y) * ow + x] = s1;
    }

  const Matrix8 t = lpq_whitening(window, freq_scale, rho);
  LpqCoefficients out{ow, oh, {}};
  out.values.reserve(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      std::complex<double> f1{}, f2{}, f3{}, f4{};
      for (int k = 0; k < window; ++k) {
        const std::size_t idx = static_cast<std::size_t>(y + k) * ow + x;
        const auto wy = w1[static_cast<std::size_t>(k)];
        f1 += h1[idx];
        f2 += h0[idx] * wy;
        f3 += h1[idx] * wy;
        f4 += h1[idx] * std::conj(wy);
      }
      Vector8 v;
      v << f1.real(), f2.real(), f3.real(), f4.real(), f1.imag(), f2.imag(), f3.imag(), f4.imag();
      Vector8 wv = t * v;
      for (int i = 0; i < 8; ++i)
        if (std::abs(wv(i)) < 1e-8) wv(i) = 0.0;
      out.values.push_back(wv);
    }
  return out;
}

/// Binary LPQ: bit i set iff whitened coefficient i >= 0; 256-bin histogram.
inline FeatureVector lpq_descriptor(const GrayImage& img, const LpqConfig& cfg = {}) {
  cfg.validate();
  LpqConfig binary = cfg;
  binary.tau = 0.0;
  const auto coeffs = lpq_coefficients(img, cfg.window, cfg.freq_scale, cfg.rho);
  std::vector<std::uint32_t> codes;
  codes.reserve(coeffs.values.size());
  for (const auto& v : coeffs.values) {
    std::uint32_t c = 0;
    for (int i = 0; i < 8; ++i)
      if (v(i) >= 0.0) c |= 1u << i;
    codes.push_back(c);
  }
  return {normalized_histogram(codes, 256), "lpq", binary.str(), {}};
}

/// Ternary LPQ on std-normalized coefficients: positive and negative 8-bit
/// halves, two 256-bin histograms (512 values).
inline std::vector<double> ternary_lpq_histogram(const LpqCoefficients& coeffs, double tau) {
  Vector8 mean = Vector8::Zero(), sq = Vector8::Zero();
  for (const auto& v : coeffs.values) mean += v;
  const double n = static_cast<double>(coeffs.values.size());
  mean /= n;
  for (const auto& v : coeffs.values) sq += (v - mean).cwiseAbs2();
  Vector8 inv;
  for (int i = 0; i < 8; ++i) {
    const double sd = std::sqrt(sq(i) / n);
    inv(i) = sd > 0.0 ? 1.0 / sd : 1.0;
  }
  std::vector<std::uint32_t> pos, neg;
  pos.reserve(coeffs.values.size());
  neg.reserve(coeffs.values.size());
  for (const auto& v : coeffs.values) {
    std::uint32_t p = 0, q = 0;
    for (int i = 0; i < 8; ++i) {
      const double z = v(i) * inv(i);
      if (z >= tau) p |= 1u << i;
      else if (z < -tau) q |= 1u << i;
    }
    pos.push_back(p);
    neg.push_back(q);
  }
  auto h = normalized_histogram(pos, 256);
  append(h, normalized_histogram(neg, 256));
  return h;
}

struct MlpqGrid {
  std::vector<int> windows{3, 7, 11};
  std::vector<double> freq_scales{0.75, 0.95, 1.15, 1.35, 1.55, 1.75, 1.95};
  std::vector<double> taus{0.2, 0.4, 0.6, 0.8, 1.0};
  double rho = 0.9;

  std::size_t size() const { return windows.size() * freq_scales.size() * taus.size(); }

  std::vector<LpqConfig> configs() const {
    std::vector<LpqConfig> out;
    for (int w : windows)
      for (double s : freq_scales)
        for (double t : taus) out.push_back({w, s, rho, t});
    return out;
  }
};

/// One ternary-LPQ vector per (window, scale, tau); each feeds its own SVM.
inline std::vector<FeatureVector> mlpq_bank(const GrayImage& img, const MlpqGrid& grid = {}) {
  std::vector<FeatureVector> out;
  out.reserve(grid.size());
  for (int w : grid.windows)
    for (double s : grid.freq_scales) {
      LpqConfig base{w, s, grid.rho, 0.0};
      base.validate();
      const auto coeffs = lpq_coefficients(img, w, s, grid.rho);
      for (double t : grid.taus) {
        LpqConfig cfg = base;
        cfg.tau = t;
        cfg.validate();
        out.push_back({ternary_lpq_histogram(coeffs, t), "mlpq", cfg.str(), {}});
      }
    }
  return out;
}

}  // namespace texens
