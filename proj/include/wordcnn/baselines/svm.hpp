#pragma once

// One-vs-rest linear SVMs over sparse features. Each binary problem
// minimizes  lambda/2 * (|w|^2 + b^2) + mean_i max(0, 1 - y_i (w.x_i + b))
// by Pegasos SGD (step 1 / (lambda t)); the bias is a constant feature and
// is regularized with the weights.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "wordcnn/baselines/tfidf.hpp"
#include "wordcnn/error.hpp"
#include "wordcnn/numerics.hpp"

namespace wordcnn::baselines {

struct SvmConfig {
  double lambda = 1e-4;
  int epochs = 20;
  std::uint64_t seed = 1;

  void validate() const {
    require(lambda > 0.0, ErrorKind::kConfig, "svm: lambda must be positive");
    require(epochs >= 0, ErrorKind::kConfig, "svm: epochs must be >= 0");
  }
};

struct LinearSvm {
  Matrix<double> weights;    // classes x dim
  std::vector<double> bias;  // per class
  SvmConfig config;

  std::size_t class_count() const noexcept { return weights.rows(); }
  std::size_t dim() const noexcept { return weights.cols(); }
};

inline double sparse_dot(std::span<const double> w, const SparseVector& x) {
  double s = 0.0;
  for (const auto& [i, v] : x) s += w[i] * v;
  return s;
}

/// The binary objective above, for labels in {-1, +1}.
inline double hinge_objective(std::span<const double> w, double b,
                              const std::vector<SparseVector>& xs,
                              const std::vector<int>& ys, double lambda) {
  double reg = b * b;
  for (double v : w) reg += v * v;
  double hinge = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    hinge += std::max(0.0, 1.0 - ys[i] * (sparse_dot(w, xs[i]) + b));
  }
  return 0.5 * lambda * reg + hinge / static_cast<double>(xs.size());
}

/// Subgradient of hinge_objective; at a kink the hinge term contributes 0.
inline std::vector<double> hinge_subgradient(std::span<const double> w, double b,
                                             const std::vector<SparseVector>& xs,
                                             const std::vector<int>& ys, double lambda,
                                             double* bias_grad = nullptr) {
  std::vector<double> g(w.begin(), w.end());
  for (auto& v : g) v *= lambda;
  double gb = lambda * b;
  const double inv_n = 1.0 / static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] * (sparse_dot(w, xs[i]) + b) < 1.0) {
      for (const auto& [j, v] : xs[i]) g[j] -= inv_n * ys[i] * v;
      gb -= inv_n * ys[i];
    }
  }
  if (bias_grad) *bias_grad = gb;
  return g;
}

namespace detail {

inline void check_features(const std::vector<SparseVector>& xs, std::size_t dim) {
  for (const auto& x : xs) {
    for (const auto& e : x) {
      require(e.first < dim, ErrorKind::kInvalidInput, "svm: feature index out of range");
    }
  }
}

/// Pegasos on one binary problem. w is kept as scale * v so the shrink
/// step is O(1).
inline void pegasos(std::span<double> w, double& b, const std::vector<SparseVector>& xs,
                    const std::vector<int>& ys, const SvmConfig& config) {
  std::vector<double> v(w.size(), 0.0);
  double vb = 0.0;
  double scale = 1.0;
  SeededRng rng(config.seed);
  std::vector<std::size_t> order(xs.size());
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order.begin(), order.end());
    for (auto i : order) {
      ++t;
      const double eta = 1.0 / (config.lambda * static_cast<double>(t));
      const double margin = ys[i] * scale * (sparse_dot(v, xs[i]) + vb);
      const double shrink = 1.0 - eta * config.lambda;
      if (shrink <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        vb = 0.0;
        scale = 1.0;
      } else {
        scale *= shrink;
      }
      if (margin < 1.0) {
        const double step = eta * ys[i] / scale;
        for (const auto& [j, x] : xs[i]) v[j] += step * x;
        vb += step;
      }
      if (scale < 1e-9) {
        for (auto& x : v) x *= scale;
        vb *= scale;
        scale = 1.0;
      }
    }
  }
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = scale * v[j];
  b = scale * vb;
}

}  // namespace detail

/// Trains one binary classifier per class (class c against the rest).
/// The sample order depends only on the seed, so classifier c does not
/// change when the other classes' labels are permuted among themselves.
inline LinearSvm svm_train(const std::vector<SparseVector>& xs,
                           const std::vector<std::size_t>& labels, std::size_t dim,
                           const SvmConfig& config = {}) {
  config.validate();
  require(xs.size() == labels.size(), ErrorKind::kInvalidInput,
          "svm: features and labels differ in length");
  require(!xs.empty(), ErrorKind::kInvalidInput, "svm: no training examples");
  detail::check_features(xs, dim);
  std::size_t classes = 0;
  for (auto l : labels) classes = std::max(classes, l + 1);
  std::vector<std::size_t> present(classes, 0);
  for (auto l : labels) ++present[l];
  const auto distinct = std::count_if(present.begin(), present.end(),
                                      [](std::size_t n) { return n > 0; });
  require(distinct >= 2, ErrorKind::kInvalidInput, "svm: need at least two classes");

  LinearSvm model;
  model.config = config;
  model.weights = Matrix<double>(classes, dim);
  model.bias.assign(classes, 0.0);
  std::vector<int> ys(labels.size());
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < labels.size(); ++i) ys[i] = labels[i] == c ? 1 : -1;
    detail::pegasos(model.weights.row(c), model.bias[c], xs, ys, config);
  }
  return model;
}

inline std::vector<double> svm_scores(const LinearSvm& model, const SparseVector& x) {
  for (const auto& e : x) {
    require(e.first < model.dim(), ErrorKind::kInvalidInput,
            "svm_predict: feature index " + std::to_string(e.first) +
                " outside model dimension " + std::to_string(model.dim()));
  }
  std::vector<double> s(model.class_count());
  for (std::size_t c = 0; c < s.size(); ++c) {
    s[c] = sparse_dot(model.weights.row(c), x) + model.bias[c];
  }
  return s;
}

namespace detail {

inline std::size_t first_argmax(const std::vector<double>& s) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < s.size(); ++c) {
    if (s[c] > s[best]) best = c;
  }
  return best;
}

}  // namespace detail

/// Highest-scoring class; the lowest index wins ties.
inline std::size_t svm_predict(const LinearSvm& model, const SparseVector& x) {
  return detail::first_argmax(svm_scores(model, x));
}

inline std::size_t svm_predict(const LinearSvm& model, std::span<const double> x) {
  require(x.size() == model.dim(), ErrorKind::kInvalidInput,
          "svm_predict: input has dimension " + std::to_string(x.size()) + ", model " +
              std::to_string(model.dim()));
  std::vector<double> s(model.class_count());
  for (std::size_t c = 0; c < s.size(); ++c) {
    const auto w = model.weights.row(c);
    s[c] = std::inner_product(w.begin(), w.end(), x.begin(), 0.0) + model.bias[c];
  }
  return detail::first_argmax(s);
}

inline double svm_accuracy(const LinearSvm& model, const std::vector<SparseVector>& xs,
                           const std::vector<std::size_t>& labels) {
  require(!xs.empty(), ErrorKind::kInvalidInput, "svm: empty evaluation set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) correct += svm_predict(model, xs[i]) == labels[i];
  return static_cast<double>(correct) / static_cast<double>(xs.size());
}

}  // namespace wordcnn::baselines
