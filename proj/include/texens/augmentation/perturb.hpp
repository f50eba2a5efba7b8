#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "texens/core/rng.hpp"

namespace texens {

enum class PerturbMethod { zero, noise, swap };  // MethodOne, MethodTwo, MethodThree

enum class NoiseKind {
  uniform,   // z ~ U(-1/2, 1/2) (default)
  gaussian,  // z ~ N(0, 1)
};

struct PerturbParams {
  double zero_probability = 0.5;
  NoiseKind noise = NoiseKind::uniform;
  double swap_probability = 0.05;
  int donor_count = 5;

  void validate() const {
    if (!(zero_probability >= 0.0 && zero_probability <= 1.0))
      throw std::invalid_argument("zero probability must be in [0,1]");
    if (!(swap_probability >= 0.0 && swap_probability <= 1.0))
      throw std::invalid_argument("swap probability must be in [0,1]");
    if (donor_count < 1) throw std::invalid_argument("donor count must be >= 1");
  }
};

/// Index that must never change (the DCT DC term); none for PCA.
using Protected = std::optional<std::size_t>;

/// MethodOne: each coefficient independently zeroed with probability p.
inline void perturb_zero(std::span<double> coeffs, double p, RngStream& rng,
                         Protected keep = std::nullopt) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("perturb_zero: p must be in [0,1]");
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (keep && *keep == i) continue;
    if (rng.bernoulli(p)) coeffs[i] = 0.0;
  }
}

/// MethodTwo: coefficient += (image_std / 2) * z.
inline void perturb_noise(std::span<double> coeffs, double image_std, RngStream& rng,
                          Protected keep = std::nullopt, NoiseKind kind = NoiseKind::uniform) {
  if (!(image_std >= 0.0)) throw std::invalid_argument("perturb_noise: std must be >= 0");
  const double sigma = image_std / 2.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (keep && *keep == i) continue;
    const double z = kind == NoiseKind::uniform ? rng.uniform() - 0.5 : rng.normal();
    coeffs[i] += sigma * z;
  }
}

/// MethodThree: donors in order; for each donor and position, with
/// probability p the position takes the donor's value (later donors may
/// overwrite earlier swaps).
inline void perturb_swap(std::span<double> coeffs, const std::vector<std::span<const double>>& donors,
                         double p, RngStream& rng, Protected keep = std::nullopt) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("perturb_swap: p must be in [0,1]");
  for (const auto& d : donors)
    if (d.size() != coeffs.size())
      throw std::invalid_argument("perturb_swap: donor dimension mismatch");
  for (const auto& d : donors)
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (keep && *keep == i) continue;
      if (rng.bernoulli(p)) coeffs[i] = d[i];
    }
}

/// Picks `count` donor indices from a pool of `pool_size`: without
/// replacement when the pool is large enough, with replacement otherwise.
inline std::vector<std::size_t> choose_donors(std::size_t pool_size, int count, RngStream& rng) {
  if (pool_size == 0) throw std::invalid_argument("choose_donors: empty same-class pool");
  std::vector<std::size_t> out;
  if (pool_size >= static_cast<std::size_t>(count)) {
    std::vector<std::size_t> idx(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) idx[i] = i;
    for (int i = 0; i < count; ++i) {
      const std::size_t j = static_cast<std::size_t>(i) + rng.below(pool_size - static_cast<std::size_t>(i));
      std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
      out.push_back(idx[static_cast<std::size_t>(i)]);
    }
  } else {
    for (int i = 0; i < count; ++i) out.push_back(rng.below(pool_size));
  }
  return out;
}

}  // namespace texens
