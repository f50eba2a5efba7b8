#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "texens/core/error.hpp"
#include "texens/core/image_io.hpp"

namespace texens {

struct Sample {
  std::string id;               // "<class>/<filename>"
  std::filesystem::path path;   // absolute or root-relative
  std::string label;
};

/// Class-labelled image collection. Class names are sorted lexicographically.
struct Dataset {
  std::filesystem::path root;
  std::vector<Sample> samples;
  std::vector<std::string> classes;

  std::size_t size() const { return samples.size(); }

  int class_index(const std::string& label) const {
    auto it = std::lower_bound(classes.begin(), classes.end(), label);
    if (it == classes.end() || *it != label) throw DataError("unknown class '" + label + "'");
    return static_cast<int>(it - classes.begin());
  }

  std::vector<int> label_indices() const {
    std::vector<int> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(class_index(s.label));
    return out;
  }

  ColorImage load(std::size_t i) const { return read_image(samples.at(i).path); }

  /// Stable text form (root-relative paths), used for determinism checks.
  std::string serialize() const {
    std::ostringstream os;
    for (const auto& c : classes) os << "class\t" << c << '\n';
    for (const auto& s : samples)
      os << s.id << '\t' << std::filesystem::relative(s.path, root).generic_string() << '\t'
         << s.label << '\n';
    return os.str();
  }

  /// Throws DataError unless ids are unique, labels are known, and there are
  /// at least two classes each with a sample.
  void validate() const {
    std::set<std::string> ids;
    std::map<std::string, int> counts;
    for (const auto& s : samples) {
      if (!ids.insert(s.id).second) throw DataError("duplicate sample id '" + s.id + "'");
      class_index(s.label);
      ++counts[s.label];
    }
    if (classes.size() < 2) throw DataError("dataset needs at least two classes");
    for (const auto& c : classes)
      if (counts[c] == 0) throw DataError("empty class '" + c + "'");
  }
};

inline bool is_image_file(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".tif" || ext == ".tiff" || ext == ".jpg" || ext == ".jpeg" ||
         ext == ".bmp";
}

namespace detail {

inline Dataset load_manifest(const std::filesystem::path& root,
                             const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw DataError("cannot read manifest '" + manifest.string() + "'");
  Dataset ds;
  ds.root = root;
  std::set<std::string> classes;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cols.push_back(c);
    if (cols.size() != 3)
      throw DataError(manifest.string() + ":" + std::to_string(lineno) + ": expected 3 columns");
    if (lineno == 1 && cols[0] == "sample_id") continue;
    ds.samples.push_back({cols[0], root / cols[1], cols[2]});
    classes.insert(cols[2]);
  }
  ds.classes.assign(classes.begin(), classes.end());
  return ds;
}

}  // namespace detail

/// Scans `root/<class>/<image>`; a `dataset.tsv` manifest in root
/// (sample_id, relative path, label) overrides scanning. With `decode` set,
/// every image is decoded once so unreadable files fail here, by name.
inline Dataset load_dataset(const std::filesystem::path& root, bool decode = true) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw DataError("dataset root '" + root.string() + "' not found");

  Dataset ds;
  if (fs::exists(root / "dataset.tsv")) {
    ds = detail::load_manifest(root, root / "dataset.tsv");
  } else {
    ds.root = root;
    std::vector<fs::path> class_dirs;
    for (const auto& e : fs::directory_iterator(root))
      if (e.is_directory() && e.path().filename().string().front() != '.')
        class_dirs.push_back(e.path());
    std::sort(class_dirs.begin(), class_dirs.end());
    for (const auto& dir : class_dirs) {
      const std::string label = dir.filename().string();
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && is_image_file(e.path()) &&
            e.path().filename().string().front() != '.')
          files.push_back(e.path());
      if (files.empty()) throw DataError("empty class '" + label + "'");
      std::sort(files.begin(), files.end());
      for (const auto& f : files)
        ds.samples.push_back({label + "/" + f.filename().string(), f, label});
      ds.classes.push_back(label);
    }
  }
  ds.validate();
  if (decode)
    for (const auto& s : ds.samples) (void)read_image(s.path);
  return ds;
}

}  // namespace texens
