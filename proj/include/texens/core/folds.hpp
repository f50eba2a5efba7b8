#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "texens/core/dataset.hpp"
#include "texens/core/rng.hpp"

namespace texens {

/// Stratified assignment of every dataset sample to one of k folds.
struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> sample_ids;  // dataset order
  std::vector<int> fold;                // fold[i] in [0,k)

  std::vector<std::size_t> test_indices(int f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold.size(); ++i)
      if (fold[i] == f) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> train_indices(int f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold.size(); ++i)
      if (fold[i] != f) out.push_back(i);
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["k"] = k;
    j["seed"] = seed;
    auto& a = j["assignment"] = nlohmann::json::array();
    for (std::size_t i = 0; i < fold.size(); ++i)
      a.push_back({{"sample_id", sample_ids[i]}, {"fold", fold[i]}});
    return j;
  }

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

/// Each class is shuffled under its own seeded stream, then dealt
/// round-robin starting where the previous class stopped, so per-class and
/// total fold sizes both differ by at most one.
inline FoldPlan make_folds(const Dataset& ds, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("make_folds: k must be >= 2");
  if (static_cast<std::size_t>(k) > ds.size())
    throw std::invalid_argument("make_folds: k=" + std::to_string(k) + " exceeds sample count " +
                                std::to_string(ds.size()));
  const auto labels = ds.label_indices();
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.fold.assign(ds.size(), -1);
  for (const auto& s : ds.samples) plan.sample_ids.push_back(s.id);

  int next = 0;
  for (std::size_t c = 0; c < ds.classes.size(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == static_cast<int>(c)) members.push_back(i);
    if (members.size() < 2)
      throw DataError("make_folds: class '" + ds.classes[c] +
                      "' has a single sample; its training split would lack the class");
    RngStream rng(seed, ds.classes[c], 0, "folds");
    for (std::size_t i = members.size(); i > 1; --i)
      std::swap(members[i - 1], members[rng.below(i)]);
    for (std::size_t idx : members) {
      plan.fold[idx] = next;
      next = (next + 1) % k;
    }
  }
  return plan;
}

}  // namespace texens
