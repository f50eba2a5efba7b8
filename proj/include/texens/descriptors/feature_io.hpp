#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "texens/core/error.hpp"
#include "texens/descriptors/feature.hpp"

namespace texens {

struct FeatureRow {
  std::string sample_id;
  std::string label;
  std::vector<double> values;
};

struct FeatureFile {
  std::string descriptor;  // member tag, e.g. "mlpq:w3_s0.75_rho0.9_t0.2@R"
  std::string config;
  std::string fingerprint;
  std::vector<FeatureRow> rows;
};

inline std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// Header `# descriptor=..<TAB>config=..<TAB>fingerprint=..`, then one
/// `sample_id<TAB>label<TAB>v0,v1,...` row per sample (9 significant digits).
inline void write_feature_file(const std::filesystem::path& path, const FeatureFile& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "# descriptor=" << f.descriptor << "\tconfig=" << f.config
      << "\tfingerprint=" << f.fingerprint << '\n';
  for (const auto& r : f.rows) {
    out << r.sample_id << '\t' << r.label << '\t';
    for (std::size_t i = 0; i < r.values.size(); ++i)
      out << (i ? "," : "") << format_g9(r.values[i]);
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

inline FeatureFile read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  FeatureFile f;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw DataError(path.string() + ": missing feature header");
  std::stringstream hs(line.substr(2));
  for (std::string field; std::getline(hs, field, '\t');) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = field.substr(0, eq), value = field.substr(eq + 1);
    if (key == "descriptor") f.descriptor = value;
    else if (key == "config") f.config = value;
    else if (key == "fingerprint") f.fingerprint = value;
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    FeatureRow r;
    std::string values;
    if (!std::getline(ss, r.sample_id, '\t') || !std::getline(ss, r.label, '\t') ||
        !std::getline(ss, values))
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    std::stringstream vs(values);
    for (std::string v; std::getline(vs, v, ',');) r.values.push_back(std::stod(v));
    f.rows.push_back(std::move(r));
  }
  return f;
}

/// Reads only the header line; empty fingerprint if the file is absent or malformed.
inline std::string feature_file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) return {};
  const auto pos = line.find("fingerprint=");
  if (pos == std::string::npos) return {};
  return line.substr(pos + 12);
}

}  // namespace texens
