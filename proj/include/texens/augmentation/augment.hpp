#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "texens/augmentation/dct.hpp"
#include "texens/augmentation/geometric.hpp"
#include "texens/augmentation/pca.hpp"
#include "texens/augmentation/perturb.hpp"
#include "texens/core/image.hpp"
#include "texens/core/rng.hpp"

namespace texens {

/// Inputs the feature-transform apps need beyond the image itself.
struct AugmentContext {
  int transform_width = 224;   // App5/App6 work on a square resize
  int transform_height = 224;
  const std::vector<PcaBasis>* pca = nullptr;     // App5: one basis per processed channel
  const std::vector<ColorImage>* donors = nullptr;  // same-class pool for MethodThree (self excluded)
  std::optional<PerturbMethod> method;            // fixed method; uniform pick when empty
  PerturbParams params;
  bool restore_native_size = true;
};

/// Draws a GeoSpec for App1..App4.
inline GeoSpec draw_geo_spec(int app, RngStream& rng) {
  if (app < 1 || app > 4) throw std::invalid_argument("draw_geo_spec: app must be 1..4");
  GeoSpec g;
  g.flip_lr = rng.bernoulli(0.5);
  if (app == 1) return g;
  g.flip_tb = rng.bernoulli(0.5);
  g.scale_x = rng.uniform(1.0, 2.0);
  g.scale_y = rng.uniform(1.0, 2.0);
  if (app == 2) return g;
  g.rotation_deg = rng.uniform(-10.0, 10.0);
  g.translate_x = static_cast<double>(rng.below(6));
  g.translate_y = static_cast<double>(rng.below(6));
  if (app == 3) return g;
  g.shear_x_deg = rng.uniform(0.0, 30.0);
  g.shear_y_deg = rng.uniform(0.0, 30.0);
  return g;
}

namespace detail {

inline double sample_std(const std::vector<const GrayImage*>& planes) {
  double s = 0.0, n = 0.0;
  for (const auto* p : planes)
    for (double v : p->pixels()) {
      s += v;
      n += 1.0;
    }
  const double m = s / n;
  double ss = 0.0;
  for (const auto* p : planes)
    for (double v : p->pixels()) ss += (v - m) * (v - m);
  return n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

inline PerturbMethod pick_method(const AugmentContext& ctx, RngStream& rng) {
  if (ctx.method) return *ctx.method;
  return static_cast<PerturbMethod>(rng.below(3));
}

}  // namespace detail

/// App5 (PCA) / App6 (DCT): project each channel, perturb the coefficients
/// with one of the three methods, reconstruct, clamp, optionally resize back,
/// then flip left-right with probability 0.5.
inline ColorImage feature_transform_augment(const ColorImage& img, int app,
                                            const AugmentContext& ctx, RngStream& rng) {
  ctx.params.validate();
  if (app == 6 && ctx.transform_width != ctx.transform_height)
    throw std::invalid_argument("App6 requires a square transform size");
  if (app == 5 && (!ctx.pca || ctx.pca->empty()))
    throw std::invalid_argument("App5 requires a fitted PCA basis");
  const int n = ctx.transform_width;
  const bool gray = img.is_grayscale();
  const int channels = gray ? 1 : 3;
  if (app == 5 && static_cast<int>(ctx.pca->size()) < channels)
    throw std::invalid_argument("App5: need one PCA basis per channel");

  const ColorImage work = resize_bilinear(img, n, n);
  const PerturbMethod method = detail::pick_method(ctx, rng);

  std::vector<const GrayImage*> planes;
  for (int c = 0; c < channels; ++c) planes.push_back(&work.planes[static_cast<std::size_t>(c)]);
  const double image_std = detail::sample_std(planes);

  std::vector<ColorImage> donors;
  if (method == PerturbMethod::swap) {
    if (!ctx.donors || ctx.donors->empty())
      throw std::invalid_argument("MethodThree requires a same-class donor pool");
    for (std::size_t i : choose_donors(ctx.donors->size(), ctx.params.donor_count, rng))
      donors.push_back(resize_bilinear((*ctx.donors)[i], n, n));
  }

  std::optional<DctPlan> plan;
  if (app == 6) plan.emplace(n);

  auto to_coeffs = [&](const GrayImage& plane, int c) -> Eigen::VectorXd {
    if (app == 6) {
      const Eigen::MatrixXd m = plan->forward(to_matrix(plane));
      return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    }
    return pca_project(plane, (*ctx.pca)[static_cast<std::size_t>(c)]);
  };
  const Protected keep = app == 6 ? Protected{0} : std::nullopt;  // column-major (0,0)

  ColorImage out = work;
  for (int c = 0; c < channels; ++c) {
    Eigen::VectorXd coeffs = to_coeffs(work.planes[static_cast<std::size_t>(c)], c);
    std::span<double> span(coeffs.data(), static_cast<std::size_t>(coeffs.size()));
    switch (method) {
      case PerturbMethod::zero:
        perturb_zero(span, ctx.params.zero_probability, rng, keep);
        break;
      case PerturbMethod::noise:
        perturb_noise(span, image_std, rng, keep, ctx.params.noise);
        break;
      case PerturbMethod::swap: {
        std::vector<Eigen::VectorXd> dc;
        for (const auto& d : donors) {
          const auto& dp = d.is_grayscale() ? d.planes[0] : d.planes[static_cast<std::size_t>(c)];
          dc.push_back(to_coeffs(dp, c));
        }
        std::vector<std::span<const double>> spans;
        for (const auto& v : dc) spans.emplace_back(v.data(), static_cast<std::size_t>(v.size()));
        perturb_swap(span, spans, ctx.params.swap_probability, rng, keep);
        break;
      }
    }
    GrayImage rec;
    if (app == 6) {
      const Eigen::MatrixXd m = Eigen::Map<const Eigen::MatrixXd>(coeffs.data(), n, n);
      rec = from_matrix(plan->inverse(m));
    } else {
      rec = unflatten(pca_reconstruct(coeffs, (*ctx.pca)[static_cast<std::size_t>(c)]), n);
    }
    rec.clamp();
    out.planes[static_cast<std::size_t>(c)] = std::move(rec);
  }
  if (gray) out.planes[1] = out.planes[2] = out.planes[0];
  if (ctx.restore_native_size) out = resize_bilinear(out, img.width(), img.height());
  if (rng.bernoulli(0.5))
    for (auto& p : out.planes) p = flip_lr(p);
  return out;
}

/// One augmentation draw for App1..App6.
inline ColorImage augment_image(const ColorImage& img, int app, const AugmentContext& ctx,
                                RngStream& rng) {
  if (app < 1 || app > 6) throw std::invalid_argument("augment_image: app must be 1..6");
  if (app <= 4) {
    ColorImage out = geometric_transform(img, draw_geo_spec(app, rng));
    for (auto& p : out.planes) p.clamp();
    return out;
  }
  return feature_transform_augment(img, app, ctx, rng);
}

}  // namespace texens
