#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "texens/augmentation/augment.hpp"
#include "texens/core/dataset.hpp"
#include "texens/core/error.hpp"
#include "texens/core/image_io.hpp"

namespace texens {

struct ManifestRow {
  int epoch = 0;
  std::string sample_id;
  std::string label;
  int app = 0;
  std::uint64_t seed = 0;
  std::uint64_t key = 0;
  std::filesystem::path file;
};

struct ExportOptions {
  std::vector<std::size_t> export_indices;  // empty: every sample
  std::vector<std::size_t> fit_indices;     // PCA fit + donor pool; empty: export set
  std::set<std::size_t> test_indices;       // never usable for fitting
  AugmentContext context;                   // pca/donors are filled in here
  int fold = -1;
};

inline std::string manifest_header() { return "epoch\tsample_id\tclass\tapp\tseed\tkey"; }

inline void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << manifest_header() << '\n';
  for (const auto& r : rows)
    out << r.epoch << '\t' << r.sample_id << '\t' << r.label << '\t' << r.app << '\t' << r.seed
        << '\t' << to_hex(r.key) << '\n';
}

/// Writes `out/epoch_<e>/<class>/<stem>.png` for every exported sample and
/// epoch, plus `out/manifest.tsv`. The manifest is written once, after all
/// images.
inline std::vector<ManifestRow> export_augmented(const Dataset& ds, int app, int epochs,
                                                 std::uint64_t seed,
                                                 const std::filesystem::path& out_dir,
                                                 ExportOptions opt = {}) {
  namespace fs = std::filesystem;
  if (app < 1 || app > 6) throw std::invalid_argument("export_augmented: app must be 1..6");
  if (epochs < 1) throw std::invalid_argument("export_augmented: epochs must be >= 1");
  if (opt.export_indices.empty())
    for (std::size_t i = 0; i < ds.size(); ++i) opt.export_indices.push_back(i);
  if (opt.fit_indices.empty()) {
    for (std::size_t i : opt.export_indices)
      if (!opt.test_indices.count(i)) opt.fit_indices.push_back(i);
  }
  for (std::size_t i : opt.fit_indices)
    if (opt.test_indices.count(i))
      throw DataError("leakage guard: sample '" + ds.samples.at(i).id +
                      "' is marked test and cannot be used for fitting");

  std::vector<ColorImage> fit_images;
  for (std::size_t i : opt.fit_indices) fit_images.push_back(ds.load(i));

  std::vector<PcaBasis> bases;
  if (app == 5) {
    const bool gray = std::all_of(fit_images.begin(), fit_images.end(),
                                  [](const ColorImage& c) { return c.is_grayscale(); });
    for (int c = 0; c < (gray ? 1 : 3); ++c) {
      std::vector<GrayImage> planes;
      for (const auto& im : fit_images) planes.push_back(im.planes[static_cast<std::size_t>(c)]);
      auto b = fit_pca(planes, opt.context.transform_width, 0.95, c);
      b.seed = seed;
      b.fold = opt.fold;
      bases.push_back(std::move(b));
    }
    opt.context.pca = &bases;
  }

  const auto labels = ds.label_indices();
  std::vector<ManifestRow> rows;
  for (int e = 1; e <= epochs; ++e) {
    for (std::size_t i : opt.export_indices) {
      const auto& s = ds.samples.at(i);
      std::vector<ColorImage> pool;
      if (app >= 5)
        for (std::size_t k = 0; k < opt.fit_indices.size(); ++k)
          if (opt.fit_indices[k] != i && labels[opt.fit_indices[k]] == labels[i])
            pool.push_back(fit_images[k]);
      // Sole member of its class in the fit set: swapping with itself is a no-op.
      if (app >= 5 && pool.empty()) pool.push_back(ds.load(i));
      AugmentContext ctx = opt.context;
      ctx.donors = &pool;
      RngStream rng(seed, s.id, e, "app" + std::to_string(app));
      const ColorImage aug = augment_image(ds.load(i), app, ctx, rng);
      const fs::path dir = out_dir / ("epoch_" + std::to_string(e)) / s.label;
      fs::create_directories(dir);
      const fs::path file = dir / (fs::path(s.path).stem().string() + ".png");
      write_png(file, aug);
      rows.push_back({e, s.id, s.label, app, seed, rng.key(), file});
    }
  }
  write_manifest(out_dir / "manifest.tsv", rows);
  return rows;
}

}  // namespace texens
