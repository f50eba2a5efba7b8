#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "texens/core/dataset.hpp"
#include "texens/core/error.hpp"
#include "texens/core/folds.hpp"
#include "texens/core/hash.hpp"
#include "texens/core/parallel.hpp"
#include "texens/descriptors/extract.hpp"
#include "texens/descriptors/feature_io.hpp"
#include "texens/learning/scores.hpp"
#include "texens/learning/svm.hpp"

namespace texens {

/// Why an image is read. `fit` loads feed a learnable step (BSIF filters)
/// and must never touch the current test fold; `extract` loads compute
/// fixed, unsupervised features.
enum class Purpose { fit, extract };

struct Access {
  Purpose purpose = Purpose::extract;
  int fold = -1;  // -1: fold-independent
};

class ImageSource {
 public:
  virtual ~ImageSource() = default;
  virtual std::size_t size() const = 0;
  virtual ColorImage load(std::size_t i, Access access) const = 0;
};

class DatasetImageSource : public ImageSource {
 public:
  explicit DatasetImageSource(const Dataset& ds) : ds_(ds) {}
  std::size_t size() const override { return ds_.size(); }
  ColorImage load(std::size_t i, Access) const override { return ds_.load(i); }

 private:
  const Dataset& ds_;
};

struct ProtocolOptions {
  std::vector<Descriptor> ensemble = fh_prime();
  DescriptorParams params;
  double C = 100.0;
  KernelKind histogram_kernel = KernelKind::intersection;
  KernelKind statistics_kernel = KernelKind::linear;
  double tolerance = 1e-3;
  std::uint64_t bsif_seed = 1;
  unsigned threads = 0;
  std::function<void(const std::string&)> progress;
};

struct MemberResult {
  std::string member;      // descriptor:config
  Descriptor descriptor = Descriptor::ltp;
  std::string kernel;
  std::vector<std::string> channels;
  ScoreMatrix scores;      // dataset order; channel-fused when there are several channels
  double accuracy = 0.0;
};

struct EvalReport {
  std::vector<std::string> classes;
  std::vector<std::string> members;  // fusion order
  std::vector<double> fold_accuracies;
  double overall_accuracy = 0.0;
  std::size_t tested = 0;
  std::vector<std::vector<int>> confusion;  // [true][predicted]
  std::vector<MemberResult> member_results;
  std::map<std::string, double> descriptor_accuracies;  // members of one descriptor fused
  ScoreMatrix fused;
  bool grayscale = true;
  std::string fingerprint;

  double best_member_accuracy() const {
    double b = 0.0;
    for (const auto& m : member_results) b = std::max(b, m.accuracy);
    return b;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["classes"] = classes;
    j["grayscale"] = grayscale;
    j["fold_accuracies"] = fold_accuracies;
    j["overall_accuracy"] = overall_accuracy;
    j["tested"] = tested;
    j["confusion"] = confusion;
    j["member_count"] = members.size();
    j["members"] = members;
    auto& ma = j["member_accuracies"] = nlohmann::json::object();
    for (const auto& m : member_results) ma[m.member] = m.accuracy;
    j["descriptor_accuracies"] = descriptor_accuracies;
    j["fingerprint"] = fingerprint;
    return j;
  }
};

namespace detail {

// member -> channel -> rows in dataset order
struct MemberFeatures {
  Descriptor descriptor = Descriptor::ltp;
  std::vector<std::string> channels;
  std::vector<FeatureMatrix> matrices;
};
using FeatureStore = std::vector<std::pair<std::string, MemberFeatures>>;

inline void store_row(FeatureStore& store, std::size_t n, std::size_t row, Descriptor d,
                      const FeatureVector& v) {
  auto it = std::find_if(store.begin(), store.end(),
                         [&](const auto& p) { return p.first == v.member(); });
  if (it == store.end()) {
    store.emplace_back(v.member(), MemberFeatures{});
    it = std::prev(store.end());
    it->second.descriptor = d;
  }
  auto& mf = it->second;
  auto ch = std::find(mf.channels.begin(), mf.channels.end(), v.channel);
  if (ch == mf.channels.end()) {
    mf.channels.push_back(v.channel);
    mf.matrices.emplace_back(FeatureMatrix::Zero(static_cast<Eigen::Index>(n),
                                                 static_cast<Eigen::Index>(v.size())));
    ch = std::prev(mf.channels.end());
  }
  auto& m = mf.matrices[static_cast<std::size_t>(ch - mf.channels.begin())];
  if (static_cast<std::size_t>(m.cols()) != v.size())
    throw DataError("member '" + v.tag() + "' changes length between images");
  for (std::size_t k = 0; k < v.size(); ++k)
    m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k)) = v.values[k];
}

/// Extracts `which` for every image, in parallel, into a store keyed by
/// member in first-seen order.
inline FeatureStore extract_store(const ImageSource& src, const std::vector<Descriptor>& which,
                                  const DescriptorParams& params,
                                  const std::vector<BsifFilterBank>* banks, bool gray, int fold,
                                  unsigned threads) {
  const std::size_t n = src.size();
  std::vector<std::map<std::string, std::vector<FeatureVector>>> per(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        per[i] = extract_all(src.load(i, {Purpose::extract, fold}), which, params, banks, gray);
      },
      threads);
  FeatureStore store;
  for (std::size_t i = 0; i < n; ++i)
    for (Descriptor d : canonical(which))
      for (const auto& v : per[i][std::string(name(d))]) store_row(store, n, i, d, v);
  return store;
}

inline FeatureMatrix take_rows(const FeatureMatrix& m, const std::vector<std::size_t>& idx) {
  FeatureMatrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t r = 0; r < idx.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(idx[r]));
  return out;
}

}  // namespace detail

/// k-fold evaluation of the ensemble. Per fold: BSIF filters are learned
/// from training images only, one OVA SVM per member and channel is fitted
/// on the training rows and scores the test rows; channels of one member
/// are fused first, then all members are fused by the sum rule with
/// z-scores taken per member per fold.
inline EvalReport run_protocol(const ImageSource& src, const std::vector<std::string>& ids,
                               const std::vector<int>& labels,
                               const std::vector<std::string>& classes, const FoldPlan& plan,
                               const ProtocolOptions& opt = {}) {
  const std::size_t n = src.size();
  if (ids.size() != n || labels.size() != n)
    throw std::invalid_argument("run_protocol: ids/labels do not match the image source");
  if (plan.sample_ids != ids)
    throw DataError("run_protocol: fold plan was made for a different dataset");
  if (opt.ensemble.empty()) throw std::invalid_argument("run_protocol: empty ensemble");
  const auto say = [&](const std::string& m) {
    if (opt.progress) opt.progress(m);
  };

  // Colour mode is a dataset property: every image must be grayscale.
  std::vector<char> gray_flags(n, 1);
  parallel_for(
      n, [&](std::size_t i) { gray_flags[i] = src.load(i, {Purpose::extract, -1}).is_grayscale(); },
      opt.threads);
  const bool gray = std::all_of(gray_flags.begin(), gray_flags.end(), [](char c) { return c != 0; });

  std::vector<Descriptor> fixed, learned;
  for (Descriptor d : canonical(opt.ensemble)) {
    if (d == Descriptor::col && gray) continue;  // COL needs colour
    (d == Descriptor::fbsif ? learned : fixed).push_back(d);
  }
  if (fixed.empty() && learned.empty())
    throw DataError("run_protocol: no ensemble member applies to a grayscale dataset");

  say("extracting fixed descriptors");
  const auto fixed_store =
      detail::extract_store(src, fixed, opt.params, nullptr, gray, -1, opt.threads);

  std::vector<detail::FeatureStore> fold_store(static_cast<std::size_t>(plan.k));
  if (!learned.empty()) {
    for (int f = 0; f < plan.k; ++f) {
      say("fold " + std::to_string(f) + ": learning BSIF filters");
      std::vector<GrayImage> fit;
      for (std::size_t i : plan.train_indices(f)) {
        if (plan.fold[i] == f) throw DataError("leakage guard: test sample in fit set");
        const ColorImage img = src.load(i, {Purpose::fit, f});
        fit.push_back(gray ? img.planes[0] : to_gray(img));
      }
      const auto banks =
          learn_fbsif_banks(fit, splitmix64(opt.bsif_seed + static_cast<std::uint64_t>(f)),
                            opt.params.fbsif);
      fit.clear();
      fold_store[static_cast<std::size_t>(f)] =
          detail::extract_store(src, learned, opt.params, &banks, gray, f, opt.threads);
    }
  }

  // Member layout: fixed members, then learned ones (names agree across folds).
  struct MemberRef {
    std::string name;
    Descriptor d;
    bool learned;
    std::size_t index;
  };
  std::vector<MemberRef> refs;
  for (std::size_t m = 0; m < fixed_store.size(); ++m)
    refs.push_back({fixed_store[m].first, fixed_store[m].second.descriptor, false, m});
  if (!learned.empty())
    for (std::size_t m = 0; m < fold_store[0].size(); ++m)
      refs.push_back({fold_store[0][m].first, fold_store[0][m].second.descriptor, true, m});
  std::stable_sort(refs.begin(), refs.end(),
                   [](const MemberRef& a, const MemberRef& b) { return a.d < b.d; });

  std::vector<std::string> true_labels(n);
  for (std::size_t i = 0; i < n; ++i) true_labels[i] = classes.at(static_cast<std::size_t>(labels[i]));

  EvalReport rep;
  rep.classes = classes;
  rep.grayscale = gray;
  rep.member_results.resize(refs.size());
  for (std::size_t m = 0; m < refs.size(); ++m) {
    auto& mr = rep.member_results[m];
    mr.member = refs[m].name;
    mr.descriptor = refs[m].d;
    const bool hist = is_histogram(refs[m].d);
    mr.kernel = std::string(kernel_name(hist ? opt.histogram_kernel : opt.statistics_kernel));
    mr.scores = ScoreMatrix(ids, classes);
    mr.scores.provenance = {refs[m].name};
    mr.scores.folds = plan.fold;
    mr.scores.true_labels = true_labels;
  }

  say("training " + std::to_string(refs.size()) + " members x " + std::to_string(plan.k) + " folds");
  parallel_for(
      refs.size() * static_cast<std::size_t>(plan.k),
      [&](std::size_t task) {
        const std::size_t m = task / static_cast<std::size_t>(plan.k);
        const int f = static_cast<int>(task % static_cast<std::size_t>(plan.k));
        const auto& ref = refs[m];
        const auto& mf = ref.learned ? fold_store[static_cast<std::size_t>(f)].at(ref.index).second
                                     : fixed_store.at(ref.index).second;
        if (ref.learned && fold_store[static_cast<std::size_t>(f)].at(ref.index).first != ref.name)
          throw DataError("run_protocol: member layout differs between folds");
        const auto train = plan.train_indices(f), test = plan.test_indices(f);
        std::vector<int> ytrain;
        for (std::size_t i : train) ytrain.push_back(labels[i]);
        std::vector<std::string> test_ids;
        for (std::size_t i : test) test_ids.push_back(ids[i]);

        SvmOptions so;
        const bool hist = is_histogram(ref.d);
        so.kernel.kind = hist ? opt.histogram_kernel : opt.statistics_kernel;
        so.standardize = !hist;
        so.C = opt.C;
        so.tolerance = opt.tolerance;
        ScoreFusion channels(false);
        ScoreMatrix block;
        for (std::size_t c = 0; c < mf.channels.size(); ++c) {
          const auto model = train_ova_svm(detail::take_rows(mf.matrices[c], train), ytrain, classes, so);
          block = score_samples(model, detail::take_rows(mf.matrices[c], test), test_ids);
          if (mf.channels.size() > 1) channels.add(block);
        }
        if (mf.channels.size() > 1) block = channels.result();
        auto& out = rep.member_results[m].scores;
        for (std::size_t r = 0; r < test.size(); ++r)
          for (std::size_t c = 0; c < classes.size(); ++c) out.at(test[r], c) = block.at(r, c);
      },
      opt.threads);

  for (std::size_t m = 0; m < refs.size(); ++m) {
    auto& mr = rep.member_results[m];
    mr.channels = (refs[m].learned ? fold_store[0][refs[m].index].second
                                   : fixed_store[refs[m].index].second).channels;
    mr.accuracy = accuracy(predict(mr.scores), labels);
    rep.members.push_back(mr.member);
  }

  say("fusing");
  ScoreFusion all(true);
  std::map<Descriptor, ScoreFusion> per_descriptor;
  for (const auto& mr : rep.member_results) {
    all.add(mr.scores);
    per_descriptor.try_emplace(mr.descriptor, true).first->second.add(mr.scores);
  }
  for (const auto& [d, fusion] : per_descriptor)
    rep.descriptor_accuracies[std::string(name(d))] = accuracy(predict(fusion.result()), labels);
  rep.fused = all.result();

  const auto pred = predict(rep.fused);
  rep.tested = n;
  rep.overall_accuracy = accuracy(pred, labels);
  rep.confusion = confusion_matrix(pred, labels, classes.size());
  for (int f = 0; f < plan.k; ++f) {
    std::vector<int> p, t;
    for (std::size_t i : plan.test_indices(f)) p.push_back(pred[i]), t.push_back(labels[i]);
    rep.fold_accuracies.push_back(accuracy(p, t));
  }

  std::string fp = plan.to_json().dump();
  for (std::size_t i = 0; i < n; ++i) fp += "|" + ids[i] + "=" + std::to_string(labels[i]);
  for (Descriptor d : canonical(opt.ensemble)) fp += "|" + opt.params.fingerprint(d);
  fp += "|C=" + format_g9(opt.C) + "|k=" + std::string(kernel_name(opt.histogram_kernel)) + "," +
        std::string(kernel_name(opt.statistics_kernel)) + "|tol=" + format_g9(opt.tolerance) +
        "|bsif_seed=" + std::to_string(opt.bsif_seed);
  rep.fingerprint = to_hex(fnv1a64(fp));
  return rep;
}

inline EvalReport run_protocol(const Dataset& ds, const FoldPlan& plan,
                               const ProtocolOptions& opt = {}) {
  std::vector<std::string> ids;
  for (const auto& s : ds.samples) ids.push_back(s.id);
  return run_protocol(DatasetImageSource(ds), ids, ds.label_indices(), ds.classes, plan, opt);
}

}  // namespace texens
