// Acceptance run: one PASS/FAIL/SKIP line per primary criterion.
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "texens/augmentation/augment.hpp"
#include "texens/augmentation/dct.hpp"
#include "texens/augmentation/perturb.hpp"
#include "texens/core/folds.hpp"
#include "texens/descriptors/extract.hpp"
#include "texens/learning/protocol.hpp"
#include "texens/learning/wilcoxon.hpp"

using namespace texens;
using texens::testing::random_image;

namespace {

// Collects failed checks; a criterion passes when none failed.
struct Checks {
  std::vector<std::string> failed;
  std::string note;
  bool skipped = false;

  void expect(bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Dataset fake_dataset(const texens::testing::SyntheticSet& s) {
  Dataset ds;
  ds.classes = s.classes;
  for (std::size_t i = 0; i < s.ids.size(); ++i)
    ds.samples.push_back({s.ids[i], s.ids[i], s.classes[static_cast<std::size_t>(s.labels[i])]});
  return ds;
}

bool all_l1(const std::vector<double>& v, std::size_t block) {
  for (std::size_t b = 0; b < v.size(); b += block) {
    const double s = std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(b),
                                     v.begin() + static_cast<std::ptrdiff_t>(b + block), 0.0);
    if (std::abs(s - 1.0) > 1e-12) return false;
  }
  return true;
}

// 1. DCT
void dct_suite(Checks& c) {
  for (int n : {2, 8, 64}) {
    const DctPlan plan(n);
    const double e = (plan.matrix().transpose() * plan.matrix() - Eigen::MatrixXd::Identity(n, n))
                         .cwiseAbs()
                         .maxCoeff();
    c.expect(e < 1e-12, "orthonormality n=" + std::to_string(n));
  }
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  const DctPlan plan(64);
  double worst = 0, parseval = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::MatrixXd m(64, 64);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = u(gen);
    const auto k = plan.forward(m);
    worst = std::max(worst, (plan.inverse(k) - m).cwiseAbs().maxCoeff());
    parseval = std::max(parseval, std::abs(k.squaredNorm() - m.squaredNorm()) / m.squaredNorm());
  }
  c.expect(worst < 1e-9, "round trip " + fmt(worst));
  c.expect(parseval < 1e-12, "Parseval " + fmt(parseval));
  Eigen::MatrixXd m(2, 2), want(2, 2);
  m << 1, 2, 3, 4;
  want << 5, -1, -2, 0;
  c.expect((dct2(m) - want).cwiseAbs().maxCoeff() < 1e-12, "2x2 example");
  c.expect((oracle::dct2(m) - want).cwiseAbs().maxCoeff() < 1e-12, "2x2 oracle");
  c.note = "round trip " + fmt(worst) + ", Parseval " + fmt(parseval);
}

// 2. Augmentation identities
void augmentation_suite(Checks& c) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::vector<double> coeffs(4096);
  for (double& v : coeffs) v = u(gen);
  const auto orig = coeffs;
  RngStream rng(7);

  auto x = orig;
  perturb_zero(x, 0.0, rng, std::size_t{0});
  c.expect(x == orig, "MethodOne p=0");
  x = orig;
  perturb_noise(x, 0.0, rng, std::size_t{0});
  c.expect(x == orig, "MethodTwo sigma=0");
  x = orig;
  const std::vector<std::span<const double>> twins(5, std::span<const double>(orig));
  perturb_swap(x, twins, 0.5, rng, std::size_t{0});
  c.expect(x == orig, "MethodThree identical donors");

  // DC is kept by every method.
  for (int method = 0; method < 3; ++method) {
    x = orig;
    std::vector<double> other(orig.size(), 0.0);
    const std::vector<std::span<const double>> donors(5, std::span<const double>(other));
    if (method == 0) perturb_zero(x, 1.0, rng, std::size_t{0});
    if (method == 1) perturb_noise(x, 80.0, rng, std::size_t{0});
    if (method == 2) perturb_swap(x, donors, 1.0, rng, std::size_t{0});
    c.expect(x[0] == orig[0], "DC modified by method " + std::to_string(method + 1));
  }

  // MethodOne p=1 through the DCT pipeline: constant mean image.
  const auto img = random_image(32, 32, gen);
  AugmentContext ctx;
  ctx.transform_width = ctx.transform_height = 32;
  ctx.method = PerturbMethod::zero;
  ctx.params.zero_probability = 1.0;
  RngStream r2(9);
  const auto out = augment_image(ColorImage::from_gray(img), 6, ctx, r2);
  double dev = 0;
  for (double v : out.planes[0].pixels()) dev = std::max(dev, std::abs(v - img.mean()));
  c.expect(dev < 1e-9, "p=1 mean image, deviation " + fmt(dev));

  const std::size_t n = 100000;
  std::vector<double> base(n, 0.0);
  std::vector<std::vector<double>> d;
  for (int k = 1; k <= 5; ++k) d.emplace_back(n, static_cast<double>(k));
  const std::vector<std::span<const double>> spans(d.begin(), d.end());
  RngStream r3(11);
  perturb_swap(base, spans, 0.05, r3);
  const double frac =
      static_cast<double>(std::count_if(base.begin(), base.end(), [](double v) { return v != 0.0; })) /
      static_cast<double>(n);
  const double expect = 1.0 - std::pow(0.95, 5);
  c.expect(std::abs(frac - expect) <= 0.01, "swap fraction " + fmt(frac));
  c.note = "swap fraction " + fmt(frac) + " (expected " + fmt(expect) + ")";
}

// 3. Descriptor analytic suite
void descriptor_suite(Checks& c) {
  const GrayImage flat(32, 32, 90.0);
  const auto m = lbp_codes(flat, {1.0, 8});
  c.expect(std::all_of(m.codes.begin(), m.codes.end(), [](std::uint32_t v) { return v == 255u; }),
           "LBP constant code 255");

  const auto ltp = ltp_descriptor(flat);
  const auto& u8 = cached_uniform_mapping(8, UniformKind::u2);
  const auto& u16 = cached_uniform_mapping(16, UniformKind::u2);
  c.expect(ltp.values[u8(0)] == 1.0 && ltp.values[59 + u8(0)] == 1.0 &&
               ltp.values[118 + u16(0)] == 1.0 && ltp.values[361 + u16(0)] == 1.0,
           "LTP constant image");

  const auto clbp = clbp_descriptor(flat);
  c.expect(clbp.values[(8 * 10 + 8) * 2 + 1] == 1.0 && clbp.values[200 + (16 * 18 + 16) * 2 + 1] == 1.0,
           "CLBP constant image");

  const auto ric = ric_descriptor(flat);
  const std::size_t nc = ric_pair_classes().count;
  const std::uint32_t cell = ric_pair_classes().table[(255u << 8) | 255u];
  for (std::size_t r = 0; r < 3; ++r) c.expect(ric.values[r * nc + cell] == 1.0, "RIC constant image");
  c.expect(make_pair_classes(false).count == 8230, "RIC pair classes 8230");

  const auto etas = etas_descriptor(GrayImage(10, 10, 100.0));
  bool etas_ok = true;
  for (int r = 0; r < 5; ++r) etas_ok = etas_ok && etas.values[static_cast<std::size_t>(r * 9 + 8)] == 1.0;
  for (std::size_t k = 45; k < 63; ++k) etas_ok = etas_ok && etas.values[k] == 0.0;
  c.expect(etas_ok, "ETAS constant image");

  std::mt19937_64 gen(3);
  const auto img = random_image(48, 48, gen);
  const auto l = ltp_descriptor(img).values;
  c.expect(all_l1({l.begin(), l.begin() + 118}, 59) && all_l1({l.begin() + 118, l.end()}, 243), "LTP L1");
  const auto cl = clbp_descriptor(img).values;
  c.expect(all_l1({cl.begin(), cl.begin() + 200}, 200) && all_l1({cl.begin() + 200, cl.end()}, 648),
           "CLBP L1");
  c.expect(all_l1(ric_descriptor(img).values, nc), "RIC L1");
  const auto ah = ahp_descriptor(img).values;
  c.expect(all_l1({ah.begin(), ah.begin() + 12 * 59}, 59) && all_l1({ah.begin() + 12 * 59, ah.end()}, 243),
           "AHP L1");
  for (const auto& v : mlpq_bank(img)) c.expect(all_l1(v.values, 256), "MLPQ L1");

  // Brute-force oracles on ten random 16x16 images.
  const auto set = texens::testing::make_synthetic(4, 48, 3);
  const auto bank = bsif_learn_filters(sample_patches(set.images, 5, 1500, 3), 5, 8, 3);
  double worst_clbp = 0, worst_bsif = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const auto small = random_image(16, 16, gen);
    const auto fv = clbp_descriptor(small);
    auto want = oracle::clbp_hist(small, 1.0, 8);
    const auto h16 = oracle::clbp_hist(small, 2.0, 16);
    want.insert(want.end(), h16.begin(), h16.end());
    for (std::size_t i = 0; i < want.size(); ++i) worst_clbp = std::max(worst_clbp, std::abs(fv.values[i] - want[i]));
    for (double th : {-6.0, 0.0, 3.0}) {
      const auto b = bsif_descriptor(small, bank, th);
      const auto o = oracle::bsif_hist(small, bank.filters, 5, th);
      for (std::size_t i = 0; i < o.size(); ++i) worst_bsif = std::max(worst_bsif, std::abs(b.values[i] - o[i]));
    }
  }
  c.expect(worst_clbp < 1e-12, "CLBP oracle " + fmt(worst_clbp));
  c.expect(worst_bsif < 1e-12, "BSIF oracle " + fmt(worst_bsif));
  c.note = "oracle max |diff| CLBP " + fmt(worst_clbp) + ", BSIF " + fmt(worst_bsif);
}

// 4. RIC rotation invariance
void ric_rotation(Checks& c) {
  std::mt19937_64 gen(4);
  int compared = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto img = random_image(64, 64, gen);
    const auto base = ric_descriptor(img).values;
    for (int q = 1; q <= 3; ++q) {
      c.expect(ric_descriptor(rotate90(img, q)).values == base,
               "image " + std::to_string(rep) + " rotation " + std::to_string(90 * q));
      ++compared;
    }
  }
  c.note = std::to_string(compared) + " rotated descriptors compared bin-for-bin";
}

// 5. Fusion invariance
ScoreMatrix random_scores(std::mt19937_64& gen, const std::string& name) {
  std::vector<std::string> ids, classes{"a", "b", "c", "d"};
  for (int i = 0; i < 15; ++i) ids.push_back("s" + std::to_string(i));
  ScoreMatrix s(ids, classes);
  std::normal_distribution<double> n01;
  for (double& v : s.values) v = n01(gen);
  s.provenance = {name};
  for (int i = 0; i < 15; ++i) s.folds.push_back(i % 3);
  return s;
}

void fusion_invariance(Checks& c) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> pos(0.1, 10.0), shift(-50.0, 50.0);
  std::uniform_int_distribution<int> count(1, 6);
  for (int rep = 0; rep < 200; ++rep) {
    const int m = count(gen);
    std::vector<ScoreMatrix> members, scaled;
    for (int k = 0; k < m; ++k) {
      members.push_back(random_scores(gen, "m" + std::to_string(k)));
      auto s = members.back();
      const double a = pos(gen), b = shift(gen);
      for (double& v : s.values) v = a * v + b;
      scaled.push_back(s);
    }
    const auto base = sum_rule_fuse(members);
    c.expect(predict(base) == predict(sum_rule_fuse(scaled)), "affine, ensemble " + std::to_string(rep));
    auto perm = members;
    std::shuffle(perm.begin(), perm.end(), gen);
    c.expect(sum_rule_fuse(perm) == base, "commutativity, ensemble " + std::to_string(rep));
    ScoreFusion left, right, joined;
    for (std::size_t k = 0; k < members.size(); ++k) (k < members.size() / 2 ? left : right).add(members[k]);
    joined.merge(right);
    joined.merge(left);
    c.expect(joined.result() == base, "associativity, ensemble " + std::to_string(rep));
  }
  c.note = "200 ensembles";
}

// 6. SVM
void svm_suite(Checks& c) {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> n01;
  FeatureMatrix x(40, 2);
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    const double centre = i < 20 ? 0.0 : 10.0;
    x(i, 0) = centre + n01(gen);
    x(i, 1) = centre + n01(gen);
    labels.push_back(i < 20 ? 0 : 1);
  }
  for (KernelKind k : {KernelKind::linear, KernelKind::rbf}) {
    SvmOptions opt;
    opt.kernel.kind = k;
    const auto model = train_ova_svm(x, labels, {"a", "b"}, opt);
    c.expect(accuracy(predict(score_samples(model, x)), labels) == 1.0, "separable 2-class toy");
  }
  FeatureMatrix x3(45, 2);
  std::vector<int> l3;
  for (int i = 0; i < 45; ++i) {
    const int cls = i % 3;
    x3(i, 0) = 10.0 * cls + n01(gen);
    x3(i, 1) = (cls == 1 ? 10.0 : 0.0) + n01(gen);
    l3.push_back(cls);
  }
  const auto m3 = train_ova_svm(x3, l3, {"a", "b", "c"}, {Kernel{KernelKind::linear, 0}});
  c.expect(accuracy(predict(score_samples(m3, x3)), l3) == 1.0, "separable 3-class toy");

  std::uniform_int_distribution<int> size(8, 30);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int prob = 0; prob < 20; ++prob) {
    const int n = size(gen);
    std::vector<std::vector<double>> h(static_cast<std::size_t>(n), std::vector<double>(6));
    std::vector<int> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (double& v : h[static_cast<std::size_t>(i)]) s += (v = u(gen));
      for (double& v : h[static_cast<std::size_t>(i)]) v /= s;
      y[static_cast<std::size_t>(i)] = i % 3 == 0 ? 1 : -1;
    }
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int d = 0; d < 6; ++d) s += std::min(h[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)], h[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)]);
        K(i, j) = s;
      }
    const double C = prob % 2 ? 1.0 : 100.0;
    const double want = oracle::svm_dual_qp(K, y, C);
    const auto sol = solve_binary_svm(K, y, C);
    const double rel = std::abs(sol.objective - want) / std::abs(want);
    worst = std::max(worst, rel);
    c.expect(rel <= 1e-6, "QP problem " + std::to_string(prob) + " rel " + fmt(rel));
  }
  c.note = "worst relative objective gap " + fmt(worst);
}

// 7. Wilcoxon
void wilcoxon_suite(Checks& c) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> len(1, 10);
  std::normal_distribution<double> n01;
  double worst = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const int n = len(gen);
    std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      a[static_cast<std::size_t>(i)] = std::round(4 * n01(gen)) / 4;
      b[static_cast<std::size_t>(i)] = std::round(4 * n01(gen)) / 4;
    }
    worst = std::max(worst, std::abs(wilcoxon_signed_rank(a, b).p_value - oracle::wilcoxon_enumerate(a, b)));
  }
  c.expect(worst <= 1e-12, "enumeration oracle " + fmt(worst));
  const double p = wilcoxon_signed_rank({0.9, 0.92, 0.95, 0.91, 0.93}, {0.8, 0.85, 0.9, 0.88, 0.9}).p_value;
  c.expect(std::abs(p - 0.0625) < 1e-15, "n=5 dominance p " + fmt(p));
  c.note = "500 cases, max |p - oracle| " + fmt(worst) + "; n=5 p=" + fmt(p);
}

// 8. End-to-end synthetic benchmark
void synthetic_benchmark(Checks& c) {
  const auto set = texens::testing::make_synthetic(50, 64, 2024);
  const auto plan = make_folds(fake_dataset(set), 5, 1);
  ProtocolOptions opt;
  const auto rep = run_protocol(texens::testing::MemorySource(set.images), set.ids, set.labels, set.classes,
                                plan, opt);
  const double best = rep.best_member_accuracy();
  c.expect(rep.tested == 150, "tested " + std::to_string(rep.tested));
  c.expect(rep.overall_accuracy >= 0.95, "FH' accuracy " + fmt(rep.overall_accuracy));
  c.expect(rep.overall_accuracy >= best - 0.02, "FH' below best member " + fmt(best));
  c.note = "FH' " + fmt(rep.overall_accuracy) + " over " + std::to_string(rep.members.size()) +
           " members, best member " + fmt(best);
}

// 9. CHO (optional data)
void cho_benchmark(Checks& c) {
  const char* root = std::getenv("TEXENS_CHO_ROOT");
  if (!root || !*root) {
    c.skipped = true;
    c.note = "TEXENS_CHO_ROOT not set";
    return;
  }
  const Dataset ds = load_dataset(root);
  const auto plan = make_folds(ds, 5, 1);
  ProtocolOptions ltp_only;
  ltp_only.ensemble = {Descriptor::ltp};
  const auto ltp = run_protocol(ds, plan, ltp_only);
  const auto fh = run_protocol(ds, plan, ProtocolOptions{});
  c.expect(ltp.overall_accuracy >= 0.90, "LTP accuracy " + fmt(ltp.overall_accuracy));
  c.expect(fh.overall_accuracy >= ltp.overall_accuracy - 0.01, "FH' accuracy " + fmt(fh.overall_accuracy));
  c.note = "LTP " + fmt(ltp.overall_accuracy) + ", FH' " + fmt(fh.overall_accuracy);
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string title;
    double budget_s;  // 0: no runtime bound
    std::function<void(Checks&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "DCT suite", 5, dct_suite},
      {2, "augmentation identities", 30, augmentation_suite},
      {3, "descriptor analytic suite", 60, descriptor_suite},
      {4, "RIC rotation invariance", 0, ric_rotation},
      {5, "fusion invariance", 0, fusion_invariance},
      {6, "SVM toys and QP oracle", 0, svm_suite},
      {7, "Wilcoxon exact test", 0, wilcoxon_suite},
      {8, "synthetic FH' benchmark", 600, synthetic_benchmark},
      {9, "CHO benchmark", 7200, cho_benchmark},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    Checks c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.failed.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.budget_s > 0 && secs > cr.budget_s && !c.skipped)
      c.failed.push_back("runtime " + fmt(secs) + " s exceeds " + fmt(cr.budget_s) + " s");
    const char* verdict = c.skipped ? "SKIP" : c.failed.empty() ? "PASS" : "FAIL";
    std::cout << "criterion " << cr.id << " " << verdict << ": " << cr.title << " (" << fmt(secs) << " s)";
    if (!c.note.empty()) std::cout << "; " << c.note;
    if (!c.failed.empty()) {
      ++failures;
      std::cout << "; failed: " << c.failed.front();
      if (c.failed.size() > 1) std::cout << " (+" << c.failed.size() - 1 << " more)";
    }
    std::cout << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
