#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "support/synthetic.hpp"
#include "texens/core/dataset.hpp"
#include "texens/core/folds.hpp"
#include "texens/core/image.hpp"
#include "texens/core/image_io.hpp"
#include "texens/core/rng.hpp"

using namespace texens;
namespace fs = std::filesystem;

TEST(GrayImage, ValidatingConstructorRejectsOutOfRange) {
  EXPECT_THROW(GrayImage(2, 1, std::vector<double>{0.0, 256.0}), std::invalid_argument);
  EXPECT_THROW(GrayImage(2, 1, std::vector<double>{0.0, std::nan("")}), std::invalid_argument);
  EXPECT_THROW(GrayImage(2, 2, std::vector<double>{0.0}), std::invalid_argument);
  EXPECT_NO_THROW(GrayImage(2, 1, std::vector<double>{0.0, 255.0}));
}

TEST(ToGray, Rec601Weights) {
  const GrayImage z(3, 2, 0.0), full(3, 2, 255.0);
  EXPECT_EQ(to_gray({full, full, full, ColorSpace::rgb}), full);
  const GrayImage blue = to_gray({z, z, full, ColorSpace::rgb});
  for (double v : blue.pixels()) EXPECT_NEAR(v, 29.07, 1e-12);

  std::mt19937_64 gen(1);
  const ColorImage c = texens::testing::random_color_image(9, 7, gen);
  const GrayImage g = to_gray(c);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x) {
      const double ref = 0.299 * c.planes[0](x, y) + 0.587 * c.planes[1](x, y) + 0.114 * c.planes[2](x, y);
      EXPECT_NEAR(g(x, y), ref, 1e-12);
      EXPECT_GE(g(x, y), 0.0);
      EXPECT_LE(g(x, y), 255.0);
    }
  EXPECT_THROW(to_gray(convert_colorspace(c, ColorSpace::hsv)), std::invalid_argument);
}

TEST(ConvertColorspace, HsvAndLabReferenceValues) {
  const GrayImage z(2, 2, 0.0), full(2, 2, 255.0), mid(2, 2, 128.0);
  const ColorImage red{full, z, z, ColorSpace::rgb};
  const auto hsv = convert_colorspace(red, ColorSpace::hsv);
  for (double v : hsv.planes[0].pixels()) EXPECT_NEAR(v, 0.0, 1e-12);
  for (double v : hsv.planes[1].pixels()) EXPECT_NEAR(v, 255.0, 1e-9);
  const auto gray_hsv = convert_colorspace({mid, mid, mid, ColorSpace::rgb}, ColorSpace::hsv);
  for (double v : gray_hsv.planes[1].pixels()) EXPECT_EQ(v, 0.0);

  // Independent closed-form HSV for one pixel: (r,g,b) = (0.2, 0.6, 0.4).
  const ColorImage px{GrayImage(1, 1, 0.2 * 255), GrayImage(1, 1, 0.6 * 255),
                      GrayImage(1, 1, 0.4 * 255), ColorSpace::rgb};
  const auto h = convert_colorspace(px, ColorSpace::hsv);
  // max = g: H = 60*((b-r)/(max-min)) + 120 = 60*0.5+120 = 150 deg; S = 0.4/0.6; V = 0.6
  EXPECT_NEAR(h.planes[0](0, 0), 150.0 / 360.0 * 255.0, 1e-9);
  EXPECT_NEAR(h.planes[1](0, 0), (0.4 / 0.6) * 255.0, 1e-9);
  EXPECT_NEAR(h.planes[2](0, 0), 0.6 * 255.0, 1e-9);

  // White in Lab: L = 100, a = b = 0.
  const auto lab = convert_colorspace({full, full, full, ColorSpace::rgb}, ColorSpace::lab);
  EXPECT_NEAR(lab.planes[0](0, 0), 255.0, 1e-3);
  EXPECT_NEAR(lab.planes[1](0, 0), lab.planes[2](0, 0), 1e-3);
}

TEST(ResizeBilinear, IdentityConstantAndHandExample) {
  std::mt19937_64 gen(2);
  const GrayImage r = texens::testing::random_image(7, 5, gen);
  EXPECT_EQ(resize_bilinear(r, 7, 5), r);
  const GrayImage c = resize_bilinear(GrayImage(4, 4, 77.0), 9, 3);
  EXPECT_EQ(c.width(), 9);
  for (double v : c.pixels()) EXPECT_EQ(v, 77.0);

  const GrayImage two(2, 2, std::vector<double>{0, 100, 0, 100});
  const GrayImage wide = resize_bilinear(two, 4, 2);
  const double expect[4] = {0, 100.0 / 3, 200.0 / 3, 100};
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 4; ++x) EXPECT_NEAR(wide(x, y), expect[x], 1e-12);

  const GrayImage big = resize_bilinear(r, 13, 11);
  double lo = 255, hi = 0;
  for (double v : r.pixels()) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : big.pixels()) {
    EXPECT_GE(v, lo);
    EXPECT_LE(v, hi);
  }
  EXPECT_THROW(resize_bilinear(r, 0, 3), std::invalid_argument);
}

TEST(Rotate90, FourTurnsIsIdentity) {
  std::mt19937_64 gen(3);
  const GrayImage r = texens::testing::random_image(6, 4, gen);
  const GrayImage q = rotate90(r);
  EXPECT_EQ(q.width(), 4);
  EXPECT_EQ(q.height(), 6);
  EXPECT_EQ(rotate90(rotate90(q, 2), 1), r);
  EXPECT_EQ(flip_lr(flip_lr(r)), r);
  EXPECT_EQ(flip_tb(flip_tb(r)), r);
}

TEST(RngStream, DeterministicAndKeyed) {
  RngStream a(7, "cls/x.png", 3, "app5"), b(7, "cls/x.png", 3, "app5");
  RngStream c(7, "cls/x.png", 4, "app5");
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a(), vb = b(), vc = c();
    EXPECT_EQ(va, vb);
    differs = differs || va != vc;
  }
  EXPECT_TRUE(differs);
  RngStream u(1);
  double s = 0;
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    s += v;
  }
  EXPECT_NEAR(s / 100000, 0.5, 0.005);
  for (int i = 0; i < 1000; ++i) ASSERT_LT(u.below(7), 7u);
}

namespace {
void write_gray_png(const fs::path& p, int w, int h, double v) {
  fs::create_directories(p.parent_path());
  write_png(p, GrayImage(w, h, v));
}
}  // namespace

TEST(LoadDataset, EnumeratesSortedClassesAndIds) {
  const auto root = texens::testing::temp_dir("ds_basic");
  for (int i = 0; i < 3; ++i) write_gray_png(root / "a" / ("img" + std::to_string(i) + ".png"), 8, 8, 10.0 * i);
  for (int i = 0; i < 2; ++i) write_gray_png(root / "b" / ("z" + std::to_string(i) + ".png"), 8, 8, 50.0);
  std::ofstream(root / "b" / "notes.txt") << "ignored";
  const Dataset ds = load_dataset(root);
  ASSERT_EQ(ds.size(), 5u);
  EXPECT_EQ(ds.classes, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(ds.samples[0].id, "a/img0.png");
  EXPECT_EQ(ds.samples[4].id, "b/z1.png");
  EXPECT_EQ(ds.label_indices(), (std::vector<int>{0, 0, 0, 1, 1}));
  EXPECT_EQ(load_dataset(root).serialize(), ds.serialize());
  const ColorImage img = ds.load(1);
  EXPECT_TRUE(img.is_grayscale());
  EXPECT_EQ(img.planes[0](3, 3), 10.0);
  fs::remove_all(root);
}

TEST(LoadDataset, Errors) {
  EXPECT_THROW(load_dataset("/nonexistent/texens/root"), DataError);
  const auto root = texens::testing::temp_dir("ds_empty");
  write_gray_png(root / "a" / "x.png", 4, 4, 1.0);
  fs::create_directories(root / "b");
  try {
    load_dataset(root);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("empty class"), std::string::npos);
  }
  std::ofstream(root / "b" / "broken.png") << "not a png";
  try {
    load_dataset(root);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("broken.png"), std::string::npos);
  }
  fs::remove_all(root);
}

TEST(LoadDataset, ManifestOverridesScan) {
  const auto root = texens::testing::temp_dir("ds_manifest");
  write_gray_png(root / "imgs" / "p.png", 4, 4, 1.0);
  write_gray_png(root / "imgs" / "q.png", 4, 4, 2.0);
  std::ofstream(root / "dataset.tsv") << "sample_id\tpath\tlabel\ns1\timgs/p.png\tneg\ns2\timgs/q.png\tpos\n";
  const Dataset ds = load_dataset(root);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.classes, (std::vector<std::string>{"neg", "pos"}));
  EXPECT_EQ(ds.samples[1].id, "s2");
  fs::remove_all(root);
}

TEST(ImageIo, ColourRoundTripAndSixteenBit) {
  const auto root = texens::testing::temp_dir("io");
  std::mt19937_64 gen(4);
  ColorImage c = texens::testing::random_color_image(5, 4, gen);
  for (auto& p : c.planes)
    for (double& v : p.pixels()) v = std::round(v);
  write_png(root / "c.png", c);
  const ColorImage back = read_image(root / "c.png");
  for (int k = 0; k < 3; ++k) EXPECT_EQ(back.planes[static_cast<std::size_t>(k)], c.planes[static_cast<std::size_t>(k)]);

  cv::Mat m16(2, 2, CV_16UC1, cv::Scalar(65535));
  cv::imwrite((root / "w.png").string(), m16);
  const ColorImage wide = read_image(root / "w.png");
  for (double v : wide.planes[0].pixels()) EXPECT_NEAR(v, 255.0, 1e-9);
  fs::remove_all(root);
}

namespace {
Dataset fake_dataset(const std::vector<int>& per_class) {
  Dataset ds;
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    const std::string label = "c" + std::to_string(c);
    ds.classes.push_back(label);
    for (int i = 0; i < per_class[c]; ++i)
      ds.samples.push_back({label + "/" + std::to_string(i), "", label});
  }
  return ds;
}
}  // namespace

TEST(MakeFolds, StratifiedOnePerClassPerFold) {
  const Dataset ds = fake_dataset({5, 5});
  const FoldPlan plan = make_folds(ds, 5, 11);
  for (int f = 0; f < 5; ++f) {
    const auto t = plan.test_indices(f);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_NE(ds.samples[t[0]].label, ds.samples[t[1]].label);
  }
  EXPECT_EQ(make_folds(ds, 5, 11), plan);
}

TEST(MakeFolds, SizesAndBalanceFor327) {
  const Dataset ds = fake_dataset({69, 73, 64, 60, 61});  // 327 samples
  const FoldPlan plan = make_folds(ds, 5, 3);
  std::set<std::string> seen;
  for (int f = 0; f < 5; ++f) {
    const auto t = plan.test_indices(f);
    EXPECT_TRUE(t.size() == 65 || t.size() == 66) << t.size();
    for (auto i : t) seen.insert(plan.sample_ids[i]);
  }
  EXPECT_EQ(seen.size(), 327u);
  const auto labels = ds.label_indices();
  for (int c = 0; c < 5; ++c) {
    std::vector<int> counts(5, 0);
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) ++counts[static_cast<std::size_t>(plan.fold[i])];
    EXPECT_LE(*std::max_element(counts.begin(), counts.end()) - *std::min_element(counts.begin(), counts.end()), 1);
  }
  EXPECT_EQ(plan.to_json()["assignment"].size(), 327u);
}

TEST(MakeFolds, Errors) {
  const Dataset ds = fake_dataset({3, 3});
  EXPECT_THROW(make_folds(ds, 1, 0), std::invalid_argument);
  EXPECT_THROW(make_folds(ds, 7, 0), std::invalid_argument);
  EXPECT_THROW(make_folds(fake_dataset({1, 5}), 2, 0), DataError);
  // Classes smaller than k spill round-robin instead of failing.
  EXPECT_NO_THROW(make_folds(fake_dataset({2, 9}), 5, 0));
}
