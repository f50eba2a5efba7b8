#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "texens/core/error.hpp"
#include "texens/descriptors/feature.hpp"
#include "texens/learning/kernel.hpp"
#include "texens/learning/scores.hpp"

namespace texens {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SvmOptions {
  Kernel kernel;
  double C = 100.0;
  double tolerance = 1e-3;        // stop when max KKT violation m - M < tolerance
  bool standardize = false;       // per-dimension z-score fitted on the training rows
  std::size_t max_iterations = 0; // 0: max(10^7, 1000 n)
};

/// Dual of one binary subproblem: min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0.
struct BinarySolution {
  std::vector<double> alpha;
  double bias = 0.0;  // decision(x) = sum a_i y_i K(x_i, x) + bias
  double objective = 0.0;
  double max_violation = 0.0;
  std::size_t iterations = 0;
};

/// SMO with second-order working-set selection over a precomputed kernel
/// matrix. `y` holds +1/-1.
inline BinarySolution solve_binary_svm(const Eigen::MatrixXd& K, const std::vector<int>& y,
                                       double C, double tolerance = 1e-3,
                                       std::size_t max_iterations = 0) {
  const std::size_t n = y.size();
  if (static_cast<std::size_t>(K.rows()) != n || static_cast<std::size_t>(K.cols()) != n)
    throw std::invalid_argument("solve_binary_svm: kernel/label size mismatch");
  if (!(C > 0)) throw std::invalid_argument("solve_binary_svm: C must be positive");
  if (max_iterations == 0) max_iterations = std::max<std::size_t>(10'000'000, 1000 * n);
  constexpr double tau = 1e-12;
  const auto Q = [&](std::size_t i, std::size_t j) {
    return static_cast<double>(y[i] * y[j]) * K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };

  BinarySolution sol;
  auto& a = sol.alpha;
  a.assign(n, 0.0);
  std::vector<double> g(n, -1.0);  // gradient Qa - e
  const auto in_up = [&](std::size_t t) { return y[t] > 0 ? a[t] < C : a[t] > 0; };
  const auto in_low = [&](std::size_t t) { return y[t] > 0 ? a[t] > 0 : a[t] < C; };

  for (;; ++sol.iterations) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * g[t];
      if (in_up(t) && v > gmax) gmax = v, i = t;
      if (in_low(t) && v < gmin) gmin = v;
    }
    sol.max_violation = (i == n || !std::isfinite(gmin)) ? 0.0 : gmax - gmin;
    if (i == n || sol.max_violation < tolerance) break;
    if (sol.iterations >= max_iterations)
      throw NumericalError("SMO did not converge in " + std::to_string(max_iterations) +
                           " iterations (violation " + std::to_string(sol.max_violation) + ")");

    std::size_t j = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double b = gmax + y[t] * g[t];
      if (b <= 0) continue;
      double quad = Q(i, i) + Q(t, t) - 2.0 * y[i] * y[t] * Q(i, t);
      if (quad <= 0) quad = tau;
      const double obj = -(b * b) / quad;
      if (obj <= best) best = obj, j = t;
    }
    if (j == n) break;

    const double ai = a[i], aj = a[j];
    if (y[i] != y[j]) {
      double quad = Q(i, i) + Q(j, j) + 2.0 * Q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (-g[i] - g[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0) {
        if (a[j] < 0) a[j] = 0, a[i] = diff;
      } else if (a[i] < 0) {
        a[i] = 0, a[j] = -diff;
      }
      if (diff > 0) {
        if (a[i] > C) a[i] = C, a[j] = C - diff;
      } else if (a[j] > C) {
        a[j] = C, a[i] = C + diff;
      }
    } else {
      double quad = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (g[i] - g[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > C) {
        if (a[i] > C) a[i] = C, a[j] = sum - C;
      } else if (a[j] < 0) {
        a[j] = 0, a[i] = sum;
      }
      if (sum > C) {
        if (a[j] > C) a[j] = C, a[i] = sum - C;
      } else if (a[i] < 0) {
        a[i] = 0, a[j] = sum;
      }
    }
    const double di = a[i] - ai, dj = a[j] - aj;
    for (std::size_t t = 0; t < n; ++t) g[t] += Q(t, i) * di + Q(t, j) * dj;
  }

  // Bias from free vectors; midpoint of the feasible interval otherwise.
  double sum_free = 0.0, ub = std::numeric_limits<double>::infinity(),
         lb = -std::numeric_limits<double>::infinity();
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * g[t];
    if (a[t] > 0 && a[t] < C) {
      sum_free += yg;
      ++n_free;
    } else if ((a[t] >= C && y[t] < 0) || (a[t] <= 0 && y[t] > 0)) {
      ub = std::min(ub, yg);
    } else {
      lb = std::max(lb, yg);
    }
  }
  double rho = 0.0;
  if (n_free > 0) rho = sum_free / static_cast<double>(n_free);
  else if (std::isfinite(ub) && std::isfinite(lb)) rho = 0.5 * (ub + lb);
  else if (std::isfinite(ub)) rho = ub;
  else if (std::isfinite(lb)) rho = lb;
  sol.bias = -rho;

  double obj = 0.0;
  for (std::size_t t = 0; t < n; ++t) obj += a[t] * (g[t] - 1.0);
  sol.objective = 0.5 * obj;  // 1/2 a'(Qa - e) - 1/2 e'a
  return sol;
}

struct BinaryMachine {
  std::vector<std::size_t> support;  // rows of SvmModel::vectors
  std::vector<double> coef;          // alpha_i * y_i
  double bias = 0.0;
  std::size_t iterations = 0;
};

/// One-vs-all model. `vectors` keeps every training row referenced by a
/// machine (after standardization, if enabled).
struct SvmModel {
  std::vector<std::string> classes;
  Kernel kernel;
  double C = 100.0;
  std::size_t dim = 0;
  FeatureMatrix vectors;
  std::vector<BinaryMachine> machines;  // one per class, class order
  std::vector<double> shift, scale;     // standardization (empty when off)

  std::vector<double> prepare(const double* x) const {
    std::vector<double> v(x, x + dim);
    if (!shift.empty())
      for (std::size_t k = 0; k < dim; ++k) v[k] = (v[k] - shift[k]) / scale[k];
    return v;
  }
};

inline Eigen::MatrixXd kernel_matrix(const FeatureMatrix& x, const Kernel& k) {
  const Eigen::Index n = x.rows();
  const auto d = static_cast<std::size_t>(x.cols());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) K(i, j) = K(j, i) = k(x.row(i).data(), x.row(j).data(), d);
  return K;
}

/// `labels[i]` indexes `classes`. Needs at least two distinct labels.
inline SvmModel train_ova_svm(FeatureMatrix x, const std::vector<int>& labels,
                              std::vector<std::string> classes, const SvmOptions& opt = {}) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (labels.size() != n)
    throw std::invalid_argument("train_ova_svm: " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(n) + " samples");
  if (classes.size() < 2) throw std::invalid_argument("train_ova_svm: need at least two classes");
  std::set<int> distinct;
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= classes.size())
      throw std::invalid_argument("train_ova_svm: label out of range");
    distinct.insert(l);
  }
  if (distinct.size() < 2)
    throw std::invalid_argument("train_ova_svm: single-class input");
  if (!x.allFinite()) throw NumericalError("train_ova_svm: non-finite feature value");

  SvmModel m;
  m.classes = std::move(classes);
  m.kernel = opt.kernel;
  m.C = opt.C;
  m.dim = static_cast<std::size_t>(x.cols());
  if (opt.standardize) {
    m.shift.assign(m.dim, 0.0);
    m.scale.assign(m.dim, 1.0);
    for (std::size_t k = 0; k < m.dim; ++k) {
      const auto col = x.col(static_cast<Eigen::Index>(k));
      const double mu = col.mean();
      const double var = n > 1 ? (col.array() - mu).square().sum() / static_cast<double>(n - 1) : 0.0;
      m.shift[k] = mu;
      m.scale[k] = var > 0 ? std::sqrt(var) : 1.0;
      x.col(static_cast<Eigen::Index>(k)) = (col.array() - mu) / m.scale[k];
    }
  }

  const Eigen::MatrixXd K = kernel_matrix(x, opt.kernel);
  std::vector<char> used(n, 0);
  std::vector<BinaryMachine> raw;
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == static_cast<int>(c) ? 1 : -1;
    BinaryMachine bm;
    if (!distinct.count(static_cast<int>(c))) {
      bm.bias = -1.0;  // class absent from training: always "rest"
    } else {
      const auto s = solve_binary_svm(K, y, opt.C, opt.tolerance, opt.max_iterations);
      bm.bias = s.bias;
      bm.iterations = s.iterations;
      for (std::size_t i = 0; i < n; ++i)
        if (s.alpha[i] > 0) {
          bm.support.push_back(i);
          bm.coef.push_back(s.alpha[i] * y[i]);
          used[i] = 1;
        }
    }
    raw.push_back(std::move(bm));
  }
  // Compact the referenced rows.
  std::vector<std::size_t> remap(n, 0);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (used[i]) remap[i] = kept++;
  m.vectors.resize(static_cast<Eigen::Index>(kept), x.cols());
  for (std::size_t i = 0; i < n; ++i)
    if (used[i]) m.vectors.row(static_cast<Eigen::Index>(remap[i])) = x.row(static_cast<Eigen::Index>(i));
  for (auto& bm : raw)
    for (auto& s : bm.support) s = remap[s];
  m.machines = std::move(raw);
  return m;
}

inline SvmModel train_ova_svm(const std::vector<FeatureVector>& features,
                              const std::vector<int>& labels, std::vector<std::string> classes,
                              const SvmOptions& opt = {}) {
  if (features.empty()) throw std::invalid_argument("train_ova_svm: no samples");
  FeatureMatrix x(static_cast<Eigen::Index>(features.size()),
                  static_cast<Eigen::Index>(features.front().size()));
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != features.front().size())
      throw std::invalid_argument("train_ova_svm: inconsistent vector length at sample " +
                                  std::to_string(i));
    for (std::size_t k = 0; k < features[i].size(); ++k)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = features[i].values[k];
  }
  return train_ova_svm(std::move(x), labels, std::move(classes), opt);
}

/// Entry (i, c) is the class-c-vs-rest decision value of row i.
inline ScoreMatrix score_samples(const SvmModel& m, const FeatureMatrix& x,
                                 std::vector<std::string> ids = {}) {
  if (x.rows() > 0 && static_cast<std::size_t>(x.cols()) != m.dim)
    throw std::invalid_argument("score_samples: dimension " + std::to_string(x.cols()) +
                                " != model dimension " + std::to_string(m.dim));
  if (ids.empty())
    for (Eigen::Index i = 0; i < x.rows(); ++i) ids.push_back(std::to_string(i));
  if (ids.size() != static_cast<std::size_t>(x.rows()))
    throw std::invalid_argument("score_samples: id count mismatch");
  ScoreMatrix s(std::move(ids), m.classes);
  std::vector<double> kv(static_cast<std::size_t>(m.vectors.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto v = m.prepare(x.row(i).data());
    for (Eigen::Index r = 0; r < m.vectors.rows(); ++r)
      kv[static_cast<std::size_t>(r)] = m.kernel(m.vectors.row(r).data(), v.data(), m.dim);
    for (std::size_t c = 0; c < m.machines.size(); ++c) {
      const auto& bm = m.machines[c];
      double d = bm.bias;
      for (std::size_t k = 0; k < bm.support.size(); ++k) d += bm.coef[k] * kv[bm.support[k]];
      s.at(static_cast<std::size_t>(i), c) = d;
    }
  }
  return s;
}

}  // namespace texens
