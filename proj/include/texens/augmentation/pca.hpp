#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "texens/core/image.hpp"

namespace texens {

/// PCA subspace of flattened side x side images of one channel.
struct PcaBasis {
  int side = 0;
  Eigen::VectorXd mean;           // length side^2
  Eigen::MatrixXd components;     // m x side^2, orthonormal rows
  std::vector<double> explained;  // variance share of each kept component
  int channel = 0;
  std::uint64_t seed = 0;
  int fold = -1;
  bool degenerate = false;  // rank 0: all training images identical

  Eigen::Index dim() const { return mean.size(); }
  Eigen::Index count() const { return components.rows(); }
};

inline Eigen::VectorXd flatten(const GrayImage& img) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(img.size()));
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) v(static_cast<Eigen::Index>(i)) = px[i];
  return v;
}

inline GrayImage unflatten(const Eigen::VectorXd& v, int side) {
  GrayImage img(side, side);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = v(static_cast<Eigen::Index>(i));
  return img;
}

/// Fits on the training images resized to side x side; keeps the smallest
/// number of leading components whose variance share reaches `keep`.
inline PcaBasis fit_pca(const std::vector<GrayImage>& images, int side, double keep = 0.95,
                        int channel = 0) {
  if (images.size() < 2) throw std::invalid_argument("fit_pca: need at least 2 images");
  if (side < 1) throw std::invalid_argument("fit_pca: side must be >= 1");
  if (!(keep > 0.0 && keep <= 1.0)) throw std::invalid_argument("fit_pca: keep must be in (0,1]");
  const Eigen::Index d = static_cast<Eigen::Index>(side) * side;
  const Eigen::Index n = static_cast<Eigen::Index>(images.size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    x.row(i) = flatten(resize_bilinear(images[static_cast<std::size_t>(i)], side, side)).transpose();

  PcaBasis basis;
  basis.side = side;
  basis.channel = channel;
  basis.mean = x.colwise().mean().transpose();
  x.rowwise() -= basis.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double tol = smax * 1e-10 * static_cast<double>(std::max(n, d));
  double total = 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol && s(i) > 0.0) {
      total += s(i) * s(i);
      ++rank;
    }
  if (rank == 0) {
    basis.degenerate = true;
    basis.components.resize(0, d);
    return basis;
  }
  Eigen::Index m = 0;
  double acc = 0.0;
  while (m < rank) {
    acc += s(m) * s(m);
    basis.explained.push_back(s(m) * s(m) / total);
    ++m;
    if (acc / total >= keep - 1e-12) break;
  }
  basis.components = svd.matrixV().leftCols(m).transpose();
  return basis;
}

inline Eigen::VectorXd pca_project(const Eigen::VectorXd& x, const PcaBasis& b) {
  if (x.size() != b.dim()) throw std::invalid_argument("pca_project: dimension mismatch");
  return b.components * (x - b.mean);
}

inline Eigen::VectorXd pca_project(const GrayImage& img, const PcaBasis& b) {
  if (img.width() != b.side || img.height() != b.side)
    throw std::invalid_argument("pca_project: image size does not match basis");
  return pca_project(flatten(img), b);
}

inline Eigen::VectorXd pca_reconstruct(const Eigen::VectorXd& coeffs, const PcaBasis& b) {
  if (coeffs.size() != b.count()) throw std::invalid_argument("pca_reconstruct: dimension mismatch");
  return b.mean + b.components.transpose() * coeffs;
}

}  // namespace texens
