#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "texens/core/error.hpp"

namespace texens {

/// Decision values: rows are samples, columns classes (row-major).
/// `folds` and `true_labels` are optional per-row metadata (empty when
/// unknown); the CSV form requires both.
struct ScoreMatrix {
  std::vector<std::string> sample_ids;
  std::vector<std::string> classes;
  std::vector<double> values;
  std::vector<std::string> provenance;
  std::vector<int> folds;
  std::vector<std::string> true_labels;
  bool degenerate = false;  // set by zscore_normalize on a constant input

  ScoreMatrix() = default;
  ScoreMatrix(std::vector<std::string> ids, std::vector<std::string> cls)
      : sample_ids(std::move(ids)), classes(std::move(cls)),
        values(sample_ids.size() * classes.size(), 0.0) {}

  std::size_t rows() const { return sample_ids.size(); }
  std::size_t cols() const { return classes.size(); }
  double& at(std::size_t i, std::size_t c) { return values[i * cols() + c]; }
  double at(std::size_t i, std::size_t c) const { return values[i * cols() + c]; }

  void validate() const {
    if (values.size() != rows() * cols())
      throw std::invalid_argument("ScoreMatrix: value count does not match shape");
    if (!folds.empty() && folds.size() != rows())
      throw std::invalid_argument("ScoreMatrix: fold column length mismatch");
    if (!true_labels.empty() && true_labels.size() != rows())
      throw std::invalid_argument("ScoreMatrix: label column length mismatch");
    for (std::size_t k = 0; k < values.size(); ++k)
      if (!std::isfinite(values[k]))
        throw NumericalError("non-finite score for sample '" + sample_ids[k / cols()] +
                             "', class '" + classes[k % cols()] + "'");
  }

  /// Rows `idx` in the given order, metadata carried along.
  ScoreMatrix select_rows(const std::vector<std::size_t>& idx) const {
    ScoreMatrix out;
    out.classes = classes;
    out.provenance = provenance;
    for (std::size_t i : idx) {
      out.sample_ids.push_back(sample_ids.at(i));
      for (std::size_t c = 0; c < cols(); ++c) out.values.push_back(at(i, c));
      if (!folds.empty()) out.folds.push_back(folds[i]);
      if (!true_labels.empty()) out.true_labels.push_back(true_labels[i]);
    }
    return out;
  }

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;
};

/// Mean and sample (n-1) std over every entry. A constant matrix, or one
/// with fewer than two entries, maps to zeros and is flagged degenerate.
inline ScoreMatrix zscore_normalize(const ScoreMatrix& s) {
  ScoreMatrix out = s;
  const std::size_t n = s.values.size();
  double sd = 0.0, mean = 0.0;
  if (n >= 2) {
    mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : s.values) ss += (v - mean) * (v - mean);
    sd = std::sqrt(ss / static_cast<double>(n - 1));
  }
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    std::fill(out.values.begin(), out.values.end(), 0.0);
    out.degenerate = true;
    return out;
  }
  for (double& v : out.values) v = (v - mean) / sd;
  return out;
}

/// Normalizes each fold's block of rows separately (whole matrix if the
/// fold column is empty).
inline ScoreMatrix zscore_normalize_per_fold(const ScoreMatrix& s) {
  if (s.folds.empty()) return zscore_normalize(s);
  ScoreMatrix out = s;
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < s.rows(); ++i) groups[s.folds[i]].push_back(i);
  for (const auto& [f, idx] : groups) {
    const ScoreMatrix z = zscore_normalize(s.select_rows(idx));
    out.degenerate = out.degenerate || z.degenerate;
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < s.cols(); ++c) out.at(idx[r], c) = z.at(r, c);
  }
  return out;
}

/// Throws DataError naming the first row or column where `b` disagrees with `a`.
inline void check_same_layout(const ScoreMatrix& a, const ScoreMatrix& b) {
  const std::string who = b.provenance.empty() ? std::string("member") : b.provenance.front();
  if (a.cols() != b.cols())
    throw DataError(who + ": class count " + std::to_string(b.cols()) + " != " +
                    std::to_string(a.cols()));
  for (std::size_t c = 0; c < a.cols(); ++c)
    if (a.classes[c] != b.classes[c])
      throw DataError(who + ": column " + std::to_string(c) + " is class '" + b.classes[c] +
                      "', expected '" + a.classes[c] + "'");
  if (a.rows() != b.rows())
    throw DataError(who + ": row count " + std::to_string(b.rows()) + " != " +
                    std::to_string(a.rows()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (a.sample_ids[i] != b.sample_ids[i])
      throw DataError(who + ": row " + std::to_string(i) + " is sample '" + b.sample_ids[i] +
                      "', expected '" + a.sample_ids[i] + "'");
    if (!a.folds.empty() && !b.folds.empty() && a.folds[i] != b.folds[i])
      throw DataError(who + ": row " + std::to_string(i) + " ('" + a.sample_ids[i] +
                      "') fold mismatch");
    if (!a.true_labels.empty() && !b.true_labels.empty() && a.true_labels[i] != b.true_labels[i])
      throw DataError(who + ": row " + std::to_string(i) + " ('" + a.sample_ids[i] +
                      "') true_label mismatch");
  }
}

/// Sum-rule accumulator. Each member is z-scored once when added; the
/// result sums every entry's member values in sorted order, so the outcome
/// depends only on the multiset of members (exactly commutative and
/// associative under add/merge).
class ScoreFusion {
 public:
  explicit ScoreFusion(bool per_fold = true) : per_fold_(per_fold) {}

  void add(const ScoreMatrix& raw) {
    raw.validate();
    ScoreMatrix z = per_fold_ ? zscore_normalize_per_fold(raw) : zscore_normalize(raw);
    add_normalized(std::move(z));
  }

  void merge(const ScoreFusion& other) {
    for (const auto& m : other.members_) add_normalized(m);
  }

  std::size_t size() const { return members_.size(); }
  const std::vector<ScoreMatrix>& members() const { return members_; }

  ScoreMatrix result() const {
    if (members_.empty()) throw std::invalid_argument("sum_rule_fuse: no members");
    ScoreMatrix out = members_.front();
    out.provenance.clear();
    out.degenerate = false;
    for (const auto& m : members_)
      out.provenance.insert(out.provenance.end(), m.provenance.begin(), m.provenance.end());
    std::sort(out.provenance.begin(), out.provenance.end());
    std::vector<double> terms(members_.size());
    for (std::size_t k = 0; k < out.values.size(); ++k) {
      for (std::size_t m = 0; m < members_.size(); ++m) terms[m] = members_[m].values[k];
      std::sort(terms.begin(), terms.end());
      double s = 0.0;
      for (double t : terms) s += t;
      out.values[k] = s;
    }
    return out;
  }

 private:
  void add_normalized(ScoreMatrix z) {
    if (!members_.empty()) check_same_layout(members_.front(), z);
    members_.push_back(std::move(z));
  }

  bool per_fold_;
  std::vector<ScoreMatrix> members_;
};

inline ScoreMatrix sum_rule_fuse(const std::vector<ScoreMatrix>& members, bool per_fold = true) {
  ScoreFusion f(per_fold);
  for (const auto& m : members) f.add(m);
  return f.result();
}

/// Row-wise argmax; ties go to the lowest class index.
inline std::vector<int> predict(const ScoreMatrix& s) {
  std::vector<int> out(s.rows(), 0);
  if (s.cols() == 0) throw std::invalid_argument("predict: no classes");
  for (std::size_t i = 0; i < s.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < s.cols(); ++c)
      if (s.at(i, c) > s.at(i, best)) best = c;
    out[i] = static_cast<int>(best);
  }
  return out;
}

template <class T>
double accuracy(const std::vector<T>& pred, const std::vector<T>& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("accuracy: length mismatch (" + std::to_string(pred.size()) +
                                " vs " + std::to_string(truth.size()) + ")");
  if (pred.empty()) return 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == truth[i];
  return static_cast<double>(ok) / static_cast<double>(pred.size());
}

/// Class indices of `s.true_labels` in `s.classes`.
inline std::vector<int> truth_indices(const ScoreMatrix& s) {
  std::vector<int> out;
  for (const auto& t : s.true_labels) {
    auto it = std::find(s.classes.begin(), s.classes.end(), t);
    if (it == s.classes.end()) throw DataError("true_label '" + t + "' is not a score column");
    out.push_back(static_cast<int>(it - s.classes.begin()));
  }
  return out;
}

inline std::vector<std::vector<int>> confusion_matrix(const std::vector<int>& pred,
                                                      const std::vector<int>& truth,
                                                      std::size_t classes) {
  std::vector<std::vector<int>> m(classes, std::vector<int>(classes, 0));
  for (std::size_t i = 0; i < pred.size(); ++i)
    ++m.at(static_cast<std::size_t>(truth[i])).at(static_cast<std::size_t>(pred[i]));
  return m;
}

// ---- score CSV ---------------------------------------------------------

namespace detail {
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') cur += '"', ++i;
      else if (c == '"') quoted = false;
      else cur += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}
}  // namespace detail

inline std::string score_csv_string(const ScoreMatrix& s) {
  if (s.folds.size() != s.rows() || s.true_labels.size() != s.rows())
    throw std::invalid_argument("score CSV needs fold and true_label for every row");
  std::ostringstream os;
  os << "sample_id,fold,true_label";
  for (const auto& c : s.classes) os << ',' << detail::csv_field("score:" + c);
  os << '\n';
  char buf[32];
  for (std::size_t i = 0; i < s.rows(); ++i) {
    os << detail::csv_field(s.sample_ids[i]) << ',' << s.folds[i] << ','
       << detail::csv_field(s.true_labels[i]);
    for (std::size_t c = 0; c < s.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.9g", s.at(i, c));
      os << ',' << buf;
    }
    os << '\n';
  }
  return os.str();
}

inline void write_score_csv(const std::filesystem::path& path, const ScoreMatrix& s) {
  const std::string text = score_csv_string(s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

/// Parses a score CSV. Rows keep file order; provenance is the file stem.
inline ScoreMatrix read_score_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read score file '" + path.string() + "'");
  const std::string where = path.string();
  std::string line;
  if (!std::getline(in, line)) throw DataError(where + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = detail::csv_split(line);
  if (header.size() < 4 || header[0] != "sample_id" || header[1] != "fold" ||
      header[2] != "true_label")
    throw DataError(where + ": header must start with sample_id,fold,true_label and name " +
                    "at least one score column");
  ScoreMatrix s;
  s.provenance = {path.stem().string()};
  for (std::size_t c = 3; c < header.size(); ++c) {
    if (header[c].rfind("score:", 0) != 0 || header[c].size() == 6)
      throw DataError(where + ": column " + std::to_string(c + 1) + " ('" + header[c] +
                      "') is not a score:<class> column");
    s.classes.push_back(header[c].substr(6));
  }
  std::map<std::string, std::size_t> seen;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    const std::string at = where + ":" + std::to_string(lineno);
    if (f.size() != header.size())
      throw DataError(at + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(f.size()));
    if (!seen.emplace(f[0], lineno).second)
      throw DataError(at + ": duplicate sample_id '" + f[0] + "'");
    s.sample_ids.push_back(f[0]);
    try {
      std::size_t used = 0;
      s.folds.push_back(std::stoi(f[1], &used));
      if (used != f[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError(at + ": bad fold '" + f[1] + "'");
    }
    s.true_labels.push_back(f[2]);
    for (std::size_t c = 3; c < f.size(); ++c) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(f[c], &used);
        if (used != f[c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw DataError(at + ": column '" + header[c] + "' has non-numeric value '" + f[c] + "'");
      }
      if (!std::isfinite(v))
        throw DataError(at + ": column '" + header[c] + "' is not finite");
      s.values.push_back(v);
    }
  }
  return s;
}

/// Rows reordered by sample id (the key cmd_fuse matches on).
inline ScoreMatrix sort_rows_by_id(const ScoreMatrix& s) {
  std::vector<std::size_t> idx(s.rows());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return s.sample_ids[a] < s.sample_ids[b]; });
  return s.select_rows(idx);
}

}  // namespace texens
