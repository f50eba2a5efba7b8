#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "texens/core/hash.hpp"
#include "texens/descriptors/ahp.hpp"
#include "texens/descriptors/bsif.hpp"
#include "texens/descriptors/clbp.hpp"
#include "texens/descriptors/col.hpp"
#include "texens/descriptors/etas.hpp"
#include "texens/descriptors/lpq.hpp"
#include "texens/descriptors/ltp.hpp"
#include "texens/descriptors/mor.hpp"
#include "texens/descriptors/ric.hpp"

namespace texens {

enum class Descriptor { ltp, mlpq, clbp, ric, ahp, fbsif, col, etas, mor };

inline constexpr std::array<Descriptor, 9> all_descriptors{
    Descriptor::ltp, Descriptor::mlpq, Descriptor::clbp, Descriptor::ric, Descriptor::ahp,
    Descriptor::fbsif, Descriptor::col, Descriptor::etas, Descriptor::mor};

inline std::string_view name(Descriptor d) {
  switch (d) {
    case Descriptor::ltp: return "ltp";
    case Descriptor::mlpq: return "mlpq";
    case Descriptor::clbp: return "clbp";
    case Descriptor::ric: return "ric";
    case Descriptor::ahp: return "ahp";
    case Descriptor::fbsif: return "fbsif";
    case Descriptor::col: return "col";
    case Descriptor::etas: return "etas";
    case Descriptor::mor: return "mor";
  }
  return "?";
}

inline std::string descriptor_names() {
  std::string s;
  for (auto d : all_descriptors) s += (s.empty() ? "" : ", ") + std::string(name(d));
  return s;
}

inline Descriptor parse_descriptor(std::string_view s) {
  for (auto d : all_descriptors)
    if (name(d) == s) return d;
  throw std::invalid_argument("unknown descriptor '" + std::string(s) +
                              "' (valid: " + descriptor_names() + ")");
}

/// True for descriptors whose vectors are L1-normalized histograms (they
/// get the histogram-intersection kernel); COL and MOR are raw statistics.
inline bool is_histogram(Descriptor d) { return d != Descriptor::col && d != Descriptor::mor; }

/// The reproducible handcrafted ensemble: every descriptor above.
inline std::vector<Descriptor> fh_prime() {
  return {all_descriptors.begin(), all_descriptors.end()};
}

/// Canonical (enum) order, duplicates removed.
inline std::vector<Descriptor> canonical(std::vector<Descriptor> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

struct DescriptorParams {
  LtpConfig ltp;
  MlpqGrid mlpq;
  std::vector<NeighborhoodConfig> clbp{{1.0, 8}, {2.0, 16}};
  RicConfig ric;
  AhpConfig ahp;
  FbsifGrid fbsif;
  double etas_tau = 30.0;
  ColStdForm col_std = ColStdForm::printed;

  /// Canonical parameter string for one descriptor.
  std::string config_string(Descriptor d) const {
    char buf[64];
    switch (d) {
      case Descriptor::ltp: return ltp.str();
      case Descriptor::mlpq: {
        std::string s = "rho" + std::to_string(mlpq.rho);
        for (int w : mlpq.windows) s += "_w" + std::to_string(w);
        for (double f : mlpq.freq_scales) { std::snprintf(buf, sizeof buf, "_s%g", f); s += buf; }
        for (double t : mlpq.taus) { std::snprintf(buf, sizeof buf, "_t%g", t); s += buf; }
        return s;
      }
      case Descriptor::clbp: {
        std::string s;
        for (const auto& c : clbp) s += (s.empty() ? "" : "_") + c.str();
        return s;
      }
      case Descriptor::ric: return ric.str();
      case Descriptor::ahp: return ahp.str();
      case Descriptor::fbsif: {
        std::string s = "n" + std::to_string(fbsif.n_bits) + "_p" + std::to_string(fbsif.patch_count);
        for (int z : fbsif.sizes) s += "_l" + std::to_string(z);
        for (double t : fbsif.thresholds) { std::snprintf(buf, sizeof buf, "_th%g", t); s += buf; }
        return s;
      }
      case Descriptor::col: return col_std == ColStdForm::printed ? "std_printed" : "std_sample";
      case Descriptor::etas: { std::snprintf(buf, sizeof buf, "tau%g", etas_tau); return buf; }
      case Descriptor::mor: return "otsu_8conn";
    }
    return {};
  }

  std::string fingerprint(Descriptor d) const {
    return to_hex(fnv1a64(std::string(name(d)) + "|" + config_string(d)));
  }

  /// Member configurations produced by one descriptor (before channel replication).
  std::size_t member_count(Descriptor d) const {
    if (d == Descriptor::mlpq) return mlpq.size();
    if (d == Descriptor::fbsif) return fbsif.size();
    return 1;
  }
};

/// Descriptor vectors for one grayscale plane.
inline std::vector<FeatureVector> extract_plane(const GrayImage& plane, Descriptor d,
                                                const DescriptorParams& params,
                                                const std::vector<BsifFilterBank>* banks) {
  switch (d) {
    case Descriptor::ltp: return {ltp_descriptor(plane, params.ltp)};
    case Descriptor::mlpq: return mlpq_bank(plane, params.mlpq);
    case Descriptor::clbp: return {clbp_descriptor(plane, params.clbp)};
    case Descriptor::ric: return {ric_descriptor(plane, params.ric)};
    case Descriptor::ahp: return {ahp_descriptor(plane, params.ahp)};
    case Descriptor::fbsif:
      if (!banks) throw std::invalid_argument("fbsif: filter banks required");
      return fbsif_bank(plane, *banks, params.fbsif);
    case Descriptor::etas: return {etas_descriptor(plane, params.etas_tau)};
    case Descriptor::mor: return {mor_descriptor(plane)};
    case Descriptor::col: break;
  }
  throw std::invalid_argument("extract_plane: COL is not a per-plane descriptor");
}

/// Runs each requested descriptor. Grayscale images (three identical
/// planes) are processed once; colour images once per R/G/B plane with
/// vectors tagged by channel. COL runs once on colour images and is
/// skipped on grayscale ones. `as_gray` overrides the per-image test so a
/// whole dataset shares one member layout.
inline std::map<std::string, std::vector<FeatureVector>> extract_all(
    const ColorImage& img, const std::vector<Descriptor>& which,
    const DescriptorParams& params = {}, const std::vector<BsifFilterBank>* banks = nullptr,
    std::optional<bool> as_gray = std::nullopt) {
  std::map<std::string, std::vector<FeatureVector>> out;
  const bool gray = as_gray.value_or(img.is_grayscale());
  static constexpr std::array<const char*, 3> channel_names{"R", "G", "B"};
  for (Descriptor d : canonical(which)) {
    auto& dst = out[std::string(name(d))];
    if (d == Descriptor::col) {
      if (!gray) dst.push_back(col_descriptor(img, params.col_std));
      continue;
    }
    const int planes = gray ? 1 : 3;
    for (int c = 0; c < planes; ++c) {
      auto vs = extract_plane(img.planes[static_cast<std::size_t>(c)], d, params, banks);
      for (auto& v : vs) {
        if (!gray) v.channel = channel_names[static_cast<std::size_t>(c)];
        dst.push_back(std::move(v));
      }
    }
  }
  return out;
}

}  // namespace texens
