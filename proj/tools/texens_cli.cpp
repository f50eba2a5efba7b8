// texens: feature extraction, augmentation export, evaluation, score fusion
// and Wilcoxon comparison.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "texens/augmentation/export.hpp"
#include "texens/core/dataset.hpp"
#include "texens/core/error.hpp"
#include "texens/core/folds.hpp"
#include "texens/core/version.hpp"
#include "texens/descriptors/extract.hpp"
#include "texens/descriptors/feature_io.hpp"
#include "texens/learning/protocol.hpp"
#include "texens/learning/scores.hpp"
#include "texens/learning/wilcoxon.hpp"

namespace fs = std::filesystem;
using namespace texens;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// "fh-prime" (or "all") expands to every descriptor; otherwise a
/// comma-separated list of descriptor names.
std::vector<Descriptor> parse_descriptor_list(const std::string& s) {
  std::vector<Descriptor> out;
  for (const auto& item : split_list(s)) {
    if (item == "fh-prime" || item == "all") {
      for (Descriptor d : fh_prime()) out.push_back(d);
    } else {
      out.push_back(parse_descriptor(item));
    }
  }
  if (out.empty()) throw std::invalid_argument("empty descriptor list");
  return canonical(out);
}

std::string file_stem_for(const std::string& tag) {
  std::string s;
  for (char c : tag) {
    if (c == ':') s += "__";
    else if (c == '@') s += "_";
    else if (c == '/' || c == '\\' || c == ' ') s += '-';
    else s += c;
  }
  return s;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write '" + p.string() + "'");
  out << text;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read '" + p.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(p.string() + ": " + e.what());
  }
}

// ---- extract -------------------------------------------------------------

struct ExtractArgs {
  std::string dataset, out, descriptors = "fh-prime";
  std::uint64_t seed = 1;
  bool force = false;
  unsigned threads = 0;
};

int cmd_extract(const ExtractArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  const auto which = parse_descriptor_list(a.descriptors);
  DescriptorParams params;
  fs::create_directories(a.out);
  const std::string data_hash = to_hex(fnv1a64(ds.serialize()));
  bool gray = true;
  for (std::size_t i = 0; i < ds.size() && gray; ++i) gray = ds.load(i).is_grayscale();

  for (Descriptor d : which) {
    if (d == Descriptor::col && gray) {
      std::cerr << "col: skipped (grayscale dataset)\n";
      continue;
    }
    const std::string dname(name(d));
    std::string fp = to_hex(fnv1a64(params.fingerprint(d) + "|" + data_hash));
    if (d == Descriptor::fbsif) fp = to_hex(fnv1a64(fp + "|seed=" + std::to_string(a.seed)));

    std::vector<fs::path> existing;
    for (const auto& e : fs::directory_iterator(a.out)) {
      const std::string fn = e.path().filename().string();
      if (e.path().extension() == ".tsv" && (fn == dname + ".tsv" || fn.rfind(dname + "__", 0) == 0))
        existing.push_back(e.path());
    }
    if (!existing.empty()) {
      bool all_match = true;
      for (const auto& p : existing) all_match = all_match && feature_file_fingerprint(p) == fp;
      if (all_match) {
        std::cerr << dname << ": up to date (" << existing.size() << " files)\n";
        continue;
      }
      if (!a.force)
        throw DataError(dname + ": existing feature files in '" + a.out +
                        "' have a different fingerprint; use --force to overwrite");
      for (const auto& p : existing) fs::remove(p);
    }

    std::vector<BsifFilterBank> banks;
    if (d == Descriptor::fbsif) {
      std::vector<GrayImage> planes;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto img = ds.load(i);
        planes.push_back(gray ? img.planes[0] : to_gray(img));
      }
      banks = learn_fbsif_banks(planes, a.seed, params.fbsif);
    }
    std::vector<std::vector<FeatureVector>> per(ds.size());
    parallel_for(
        ds.size(),
        [&](std::size_t i) {
          per[i] = extract_all(ds.load(i), {d}, params, banks.empty() ? nullptr : &banks, gray)[dname];
        },
        a.threads);
    std::vector<FeatureFile> files;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (i == 0)
        for (const auto& v : per[0]) files.push_back({v.tag(), v.config, fp, {}});
      if (per[i].size() != files.size()) throw DataError(dname + ": member count differs between images");
      for (std::size_t m = 0; m < files.size(); ++m)
        files[m].rows.push_back({ds.samples[i].id, ds.samples[i].label, per[i][m].values});
    }
    for (const auto& f : files) {
      const fs::path target = fs::path(a.out) / (file_stem_for(f.descriptor) + ".tsv");
      const fs::path tmp = target.string() + ".part";
      write_feature_file(tmp, f);
      fs::rename(tmp, target);
    }
    std::cerr << dname << ": wrote " << files.size() << " files\n";
  }
  return 0;
}

// ---- augment -------------------------------------------------------------

struct AugmentArgs {
  std::string dataset, out;
  int app = 1, epochs = 1, fold = -1, k = 5, size = 224;
  std::uint64_t seed = 1;
};

int cmd_augment(const AugmentArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  ExportOptions opt;
  opt.context.transform_width = opt.context.transform_height = a.size;
  if (a.fold >= 0) {
    const FoldPlan plan = make_folds(ds, a.k, a.seed);
    if (a.fold >= a.k) throw std::invalid_argument("--fold must be < --k");
    opt.export_indices = plan.train_indices(a.fold);
    for (std::size_t i : plan.test_indices(a.fold)) opt.test_indices.insert(i);
    opt.fold = a.fold;
    fs::create_directories(a.out);
    write_text(fs::path(a.out) / "folds.json", plan.to_json().dump(2) + "\n");
  }
  const auto rows = export_augmented(ds, a.app, a.epochs, a.seed, a.out, opt);
  std::cerr << "wrote " << rows.size() << " images and manifest.tsv\n";
  return 0;
}

// ---- evaluate ------------------------------------------------------------

struct EvaluateArgs {
  std::string dataset, out, ensemble = "fh-prime", kernel = "hi", stats_kernel = "linear";
  int k = 5;
  std::uint64_t seed = 1;
  double C = 100.0;
  unsigned threads = 0;
  bool quiet = false;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  const FoldPlan plan = make_folds(ds, a.k, a.seed);
  ProtocolOptions opt;
  opt.ensemble = parse_descriptor_list(a.ensemble);
  opt.C = a.C;
  opt.histogram_kernel = parse_kernel(a.kernel);
  opt.statistics_kernel = parse_kernel(a.stats_kernel);
  opt.bsif_seed = a.seed;
  opt.threads = a.threads;
  if (!a.quiet) opt.progress = [](const std::string& m) { std::cerr << m << '\n'; };

  const auto t0 = std::chrono::system_clock::now();
  const EvalReport rep = run_protocol(ds, plan, opt);
  const auto t1 = std::chrono::system_clock::now();

  const fs::path out(a.out);
  fs::create_directories(out / "scores");
  nlohmann::json j = rep.to_json();
  std::vector<std::string> ens;
  for (Descriptor d : opt.ensemble) ens.emplace_back(name(d));
  j["config"] = {{"dataset", a.dataset}, {"k", a.k},         {"seed", a.seed},
                 {"ensemble", ens},      {"C", a.C},         {"kernel", a.kernel},
                 {"stats_kernel", a.stats_kernel}};
  j["tool_version"] = version;
  write_text(out / "report.json", j.dump(2) + "\n");
  write_text(out / "folds.json", plan.to_json().dump(2) + "\n");
  for (const auto& m : rep.member_results)
    write_score_csv(out / "scores" / (file_stem_for(m.member) + ".csv"), m.scores);
  write_score_csv(out / "fused.csv", rep.fused);

  const auto stamp = [](std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return std::string(buf);
  };
  nlohmann::json ts = {{"started", stamp(t0)},
                       {"finished", stamp(t1)},
                       {"seconds", std::chrono::duration<double>(t1 - t0).count()}};
  write_text(out / "report.timestamp.json", ts.dump(2) + "\n");

  std::cout << "members: " << rep.members.size() << "\n";
  std::cout << "fold accuracies:";
  for (double f : rep.fold_accuracies) std::cout << ' ' << format_g9(f);
  std::cout << "\noverall accuracy: " << format_g9(rep.overall_accuracy) << "\n";
  return 0;
}

// ---- fuse ----------------------------------------------------------------

int cmd_fuse(const std::vector<std::string>& inputs, const std::string& out) {
  ScoreFusion fusion(true);
  ScoreMatrix first;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    ScoreMatrix s = sort_rows_by_id(read_score_csv(inputs[k]));
    s.provenance = {inputs[k]};
    if (k == 0) first = s;
    else check_same_layout(first, s);
    fusion.add(s);
  }
  ScoreMatrix fused = fusion.result();
  if (!out.empty()) write_score_csv(out, fused);
  const double acc = accuracy(predict(fused), truth_indices(fused));
  std::cout << "members: " << inputs.size() << "\naccuracy: " << format_g9(acc) << "\n";
  return 0;
}

// ---- stats ---------------------------------------------------------------

std::vector<double> accuracy_list(const fs::path& p) {
  const auto j = read_json(p);
  const char* keys[] = {"fold_accuracies", "accuracies"};
  for (const char* key : keys)
    if (j.contains(key) && j[key].is_array()) return j[key].get<std::vector<double>>();
  throw DataError(p.string() + ": no fold_accuracies list");
}

int cmd_stats(const std::string& a, const std::string& b) {
  const auto r = wilcoxon_signed_rank(accuracy_list(a), accuracy_list(b));
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "n: " << r.n << "\nW+: " << format_g9(r.w_plus) << "\nW-: " << format_g9(r.w_minus)
            << "\nstatistic: " << format_g9(r.statistic) << "\np: " << format_g9(r.p_value)
            << "\nmethod: " << (r.exact ? "exact" : "normal") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"texens: texture descriptor ensembles and feature-transform augmentation"};
  app.set_version_flag("--version", version);
  app.set_config("--config", "", "INI/TOML config file; command-line flags take precedence");
  app.require_subcommand(1);

  ExtractArgs ex;
  auto* sx = app.add_subcommand("extract", "Write one feature file per descriptor configuration");
  sx->add_option("--dataset", ex.dataset, "Dataset root (class subdirectories)")->required();
  sx->add_option("--out", ex.out, "Output directory")->required();
  sx->add_option("--descriptors", ex.descriptors, "Comma list or fh-prime");
  sx->add_option("--seed", ex.seed, "Seed for BSIF patch sampling");
  sx->add_flag("--force", ex.force, "Overwrite feature files with another fingerprint");
  sx->add_option("--threads", ex.threads, "Worker threads (0: all cores)");

  AugmentArgs au;
  auto* sa = app.add_subcommand("augment", "Export an augmented image set with a manifest");
  sa->add_option("--dataset", au.dataset, "Dataset root")->required();
  sa->add_option("--out", au.out, "Output directory")->required();
  sa->add_option("--app", au.app, "Augmentation approach 1..6")->check(CLI::Range(1, 6));
  sa->add_option("--epochs", au.epochs, "Epochs to export")->check(CLI::PositiveNumber);
  sa->add_option("--seed", au.seed, "Seed");
  sa->add_option("--fold", au.fold, "Export only this fold's training split (-1: everything)");
  sa->add_option("--k", au.k, "Fold count used with --fold");
  sa->add_option("--size", au.size, "Square working size for App5/App6")->check(CLI::PositiveNumber);

  EvaluateArgs ev;
  auto* se = app.add_subcommand("evaluate", "Cross-validate an ensemble and write scores + report");
  se->add_option("--dataset", ev.dataset, "Dataset root")->required();
  se->add_option("--out", ev.out, "Output directory")->required();
  se->add_option("--ensemble", ev.ensemble, "Comma list of descriptors or fh-prime");
  se->add_option("--k", ev.k, "Number of folds");
  se->add_option("--seed", ev.seed, "Seed for folds and BSIF learning");
  se->add_option("--C", ev.C, "SVM regularization")->check(CLI::PositiveNumber);
  se->add_option("--kernel", ev.kernel, "Kernel for histogram descriptors (hi, linear, rbf)");
  se->add_option("--stats-kernel", ev.stats_kernel, "Kernel for COL/MOR (hi, linear, rbf)");
  se->add_option("--threads", ev.threads, "Worker threads (0: all cores)");
  se->add_flag("--quiet", ev.quiet, "No progress output");

  std::vector<std::string> fuse_in;
  std::string fuse_out;
  auto* sf = app.add_subcommand("fuse", "z-score and sum-rule fuse score CSV files");
  sf->add_option("inputs", fuse_in, "Score CSV files")->required()->check(CLI::ExistingFile);
  sf->add_option("--out", fuse_out, "Fused score CSV");

  std::string stat_a, stat_b;
  auto* ss = app.add_subcommand("stats", "Wilcoxon signed-rank test on two reports' fold accuracies");
  ss->add_option("a", stat_a, "Report A (JSON)")->required()->check(CLI::ExistingFile);
  ss->add_option("b", stat_b, "Report B (JSON)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*sx) return cmd_extract(ex);
    if (*sa) return cmd_augment(au);
    if (*se) return cmd_evaluate(ev);
    if (*sf) return cmd_fuse(fuse_in, fuse_out);
    if (*ss) return cmd_stats(stat_a, stat_b);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
