#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "texens/core/error.hpp"
#include "texens/core/image.hpp"
#include "texens/core/rng.hpp"
#include "texens/descriptors/feature.hpp"

namespace texens {

/// Learned BSIF filters: `filters` is n_bits x size^2, rows act on a
/// row-major size x size window.
struct BsifFilterBank {
  int size = 0;
  int n_bits = 0;
  Eigen::MatrixXd filters;
  std::uint64_t seed = 0;
  std::size_t patch_count = 0;

  std::string str() const {
    return "l" + std::to_string(size) + "_n" + std::to_string(n_bits) + "_seed" +
           std::to_string(seed) + "_patches" + std::to_string(patch_count);
  }
};

struct FastIcaOptions {
  double tolerance = 1e-6;
  int max_iterations = 1000;
};

/// Draws `count` random size x size windows (one column each) from `images`,
/// cycling the source image with the stream.
inline Eigen::MatrixXd sample_patches(const std::vector<GrayImage>& images, int size,
                                      std::size_t count, std::uint64_t seed) {
  if (images.empty()) throw std::invalid_argument("sample_patches: no images");
  for (const auto& im : images)
    if (im.width() < size || im.height() < size)
      throw std::invalid_argument("sample_patches: image smaller than patch");
  RngStream rng(seed, "bsif-patches", size, "bsif");
  Eigen::MatrixXd x(size * size, static_cast<Eigen::Index>(count));
  for (std::size_t n = 0; n < count; ++n) {
    const auto& im = images[rng.below(images.size())];
    const int ox = static_cast<int>(rng.below(static_cast<std::uint64_t>(im.width() - size + 1)));
    const int oy = static_cast<int>(rng.below(static_cast<std::uint64_t>(im.height() - size + 1)));
    for (int y = 0; y < size; ++y)
      for (int xx = 0; xx < size; ++xx)
        x(y * size + xx, static_cast<Eigen::Index>(n)) = im(ox + xx, oy + y);
  }
  return x;
}

namespace detail {

// (W W^T)^{-1/2} W
inline Eigen::MatrixXd symmetric_decorrelation(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w * w.transpose());
  Eigen::VectorXd d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = 1.0 / std::sqrt(std::max(d(i), 1e-300));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose() * w;
}

}  // namespace detail

/// ICA filter learning: per-patch DC removal and centring, PCA whitening to
/// n_bits dimensions, symmetric FastICA with tanh; filters = unmixing *
/// whitening, each row rescaled to unit L2 norm so thresholds are in
/// gray-level units. `patches` holds one size^2 column per patch.
inline BsifFilterBank bsif_learn_filters(Eigen::MatrixXd patches, int size, int n_bits,
                                         std::uint64_t seed, const FastIcaOptions& opt = {}) {
  const Eigen::Index d = static_cast<Eigen::Index>(size) * size;
  if (size < 2) throw std::invalid_argument("bsif: filter size must be >= 2");
  if (n_bits < 1 || n_bits > d - 1)
    throw std::invalid_argument("bsif: n_bits must be in [1, size^2-1]");
  if (patches.rows() != d) throw std::invalid_argument("bsif: patch dimension mismatch");
  const Eigen::Index n = patches.cols();
  if (n < 50 * d)
    throw std::invalid_argument("bsif: need at least 50*size^2 patches, got " + std::to_string(n));

  patches.rowwise() -= patches.colwise().mean();
  patches.colwise() -= patches.rowwise().mean();

  const Eigen::MatrixXd cov = patches * patches.transpose() / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pca(cov);
  // Eigenvalues ascending; keep the n_bits largest.
  Eigen::MatrixXd whitening(n_bits, d);
  for (int i = 0; i < n_bits; ++i) {
    const Eigen::Index col = d - 1 - i;
    const double ev = pca.eigenvalues()(col);
    if (!(ev > 1e-12 * std::max(1.0, pca.eigenvalues()(d - 1))))
      throw NumericalError("bsif: patch covariance has rank < n_bits");
    whitening.row(i) = pca.eigenvectors().col(col).transpose() / std::sqrt(ev);
  }
  const Eigen::MatrixXd z = whitening * patches;

  RngStream rng(seed, "bsif-ica-init", size, "bsif");
  Eigen::MatrixXd w(n_bits, n_bits);
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.normal();
  w = detail::symmetric_decorrelation(w);

  int it = 0;
  for (;; ++it) {
    if (it >= opt.max_iterations)
      throw NumericalError("bsif: FastICA did not converge after " + std::to_string(it) +
                           " iterations");
    const Eigen::MatrixXd y = w * z;
    const Eigen::MatrixXd g = y.array().tanh().matrix();
    const Eigen::VectorXd gprime_mean = (1.0 - g.array().square()).rowwise().mean().matrix();
    Eigen::MatrixXd w_new =
        g * z.transpose() / static_cast<double>(n) - gprime_mean.asDiagonal() * w;
    w_new = detail::symmetric_decorrelation(w_new);
    const double change =
        (1.0 - (w_new * w.transpose()).diagonal().array().abs()).abs().maxCoeff();
    w = std::move(w_new);
    if (change < opt.tolerance) break;
  }

  BsifFilterBank bank;
  bank.size = size;
  bank.n_bits = n_bits;
  bank.seed = seed;
  bank.patch_count = static_cast<std::size_t>(n);
  bank.filters = w * whitening;
  for (Eigen::Index i = 0; i < bank.filters.rows(); ++i)
    bank.filters.row(i).normalize();
  return bank;
}

/// Filter responses for every interior pixel: n_bits values per pixel.
struct BsifResponses {
  int n_bits = 0;
  std::size_t pixels = 0;
  std::vector<double> values;
};

inline BsifResponses bsif_responses(const GrayImage& img, const BsifFilterBank& bank) {
  const int l = bank.size;
  if (img.width() < l || img.height() < l)
    throw std::invalid_argument("bsif: filter larger than image");
  BsifResponses out;
  out.n_bits = bank.n_bits;
  out.pixels = static_cast<std::size_t>(img.width() - l + 1) * (img.height() - l + 1);
  out.values.reserve(out.pixels * static_cast<std::size_t>(bank.n_bits));
  Eigen::VectorXd x(l * l);
  for (int oy = 0; oy + l <= img.height(); ++oy)
    for (int ox = 0; ox + l <= img.width(); ++ox) {
      for (int y = 0; y < l; ++y)
        for (int xx = 0; xx < l; ++xx) x(y * l + xx) = img(ox + xx, oy + y);
      const Eigen::VectorXd s = bank.filters * x;
      for (int i = 0; i < bank.n_bits; ++i) out.values.push_back(s(i));
    }
  return out;
}

/// Bit i set iff response i > th; 2^n_bits-bin L1 histogram.
inline std::vector<double> bsif_histogram(const BsifResponses& r, double th) {
  std::vector<std::uint32_t> codes;
  codes.reserve(r.pixels);
  for (std::size_t p = 0; p < r.pixels; ++p) {
    std::uint32_t c = 0;
    for (int i = 0; i < r.n_bits; ++i)
      if (r.values[p * static_cast<std::size_t>(r.n_bits) + static_cast<std::size_t>(i)] > th)
        c |= 1u << i;
    codes.push_back(c);
  }
  return normalized_histogram(codes, std::size_t{1} << r.n_bits);
}

inline std::string bsif_config(const BsifFilterBank& bank, double th) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "size%d_th%g", bank.size, th);
  return buf;
}

inline FeatureVector bsif_descriptor(const GrayImage& img, const BsifFilterBank& bank,
                                     double th = 0.0) {
  return {bsif_histogram(bsif_responses(img, bank), th), "bsif", bsif_config(bank, th), {}};
}

struct FbsifGrid {
  std::vector<int> sizes{3, 5, 7, 9, 11};
  std::vector<double> thresholds{-9, -6, -3, 0, 3, 6, 9};
  int n_bits = 8;
  std::size_t patch_count = 10000;

  std::size_t size() const { return sizes.size() * thresholds.size(); }
};

/// One vector per (size, th), in size-major order. `banks` must cover
/// every size in the grid, in order.
inline std::vector<FeatureVector> fbsif_bank(const GrayImage& img,
                                             const std::vector<BsifFilterBank>& banks,
                                             const FbsifGrid& grid = {}) {
  if (banks.size() != grid.sizes.size())
    throw std::invalid_argument("fbsif: need one filter bank per size");
  std::vector<FeatureVector> out;
  out.reserve(grid.size());
  for (std::size_t s = 0; s < banks.size(); ++s) {
    if (banks[s].size != grid.sizes[s]) throw std::invalid_argument("fbsif: bank/size mismatch");
    const auto r = bsif_responses(img, banks[s]);
    for (double th : grid.thresholds)
      out.push_back({bsif_histogram(r, th), "fbsif", bsif_config(banks[s], th), {}});
  }
  return out;
}

/// Learns one bank per grid size from `images` (the training split).
inline std::vector<BsifFilterBank> learn_fbsif_banks(const std::vector<GrayImage>& images,
                                                     std::uint64_t seed,
                                                     const FbsifGrid& grid = {}) {
  std::vector<BsifFilterBank> banks;
  for (int size : grid.sizes) {
    const std::size_t count =
        std::max(grid.patch_count, static_cast<std::size_t>(50 * size * size));
    banks.push_back(bsif_learn_filters(sample_patches(images, size, count, seed), size,
                                       std::min(grid.n_bits, size * size - 1), seed));
  }
  return banks;
}

}  // namespace texens
