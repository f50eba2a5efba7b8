#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "texens/core/image.hpp"

namespace texens {

/// Orthonormal DCT-II of size n: C(k,i) = a_k cos(pi (2i+1) k / 2n),
/// a_0 = sqrt(1/n), a_k = sqrt(2/n) otherwise.
class DctPlan {
 public:
  explicit DctPlan(int n) : n_(n), c_(n, n) {
    if (n < 1) throw std::invalid_argument("DctPlan: size must be >= 1");
    for (int k = 0; k < n; ++k) {
      const double a = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      for (int i = 0; i < n; ++i)
        c_(k, i) = a * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * n));
    }
  }

  int size() const { return n_; }
  const Eigen::MatrixXd& matrix() const { return c_; }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& m) const {
    check(m);
    return c_ * m * c_.transpose();
  }
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& coeffs) const {
    check(coeffs);
    return c_.transpose() * coeffs * c_;
  }

 private:
  void check(const Eigen::MatrixXd& m) const {
    if (m.rows() != m.cols()) throw std::invalid_argument("dct: input must be square");
    if (m.rows() != n_) throw std::invalid_argument("dct: size does not match plan");
  }

  int n_;
  Eigen::MatrixXd c_;
};

inline Eigen::MatrixXd dct2(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("dct2: input must be square");
  return DctPlan(static_cast<int>(m.rows())).forward(m);
}

inline Eigen::MatrixXd idct2(const Eigen::MatrixXd& coeffs) {
  if (coeffs.rows() != coeffs.cols()) throw std::invalid_argument("idct2: input must be square");
  return DctPlan(static_cast<int>(coeffs.rows())).inverse(coeffs);
}

/// Rows = image rows (y), cols = x.
inline Eigen::MatrixXd to_matrix(const GrayImage& img) {
  Eigen::MatrixXd m(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) m(y, x) = img(x, y);
  return m;
}

/// No range check: reconstructions may leave [0,255] until clamped.
inline GrayImage from_matrix(const Eigen::MatrixXd& m) {
  GrayImage img(static_cast<int>(m.cols()), static_cast<int>(m.rows()));
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) img(x, y) = m(y, x);
  return img;
}

}  // namespace texens
