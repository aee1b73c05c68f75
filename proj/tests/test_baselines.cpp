#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "wordcnn/baselines/svm.hpp"
#include "wordcnn/baselines/tfidf.hpp"

using namespace wordcnn;
using namespace wordcnn::baselines;

namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected wordcnn::Error";
  return ErrorKind::kInternal;
}

using Docs = std::vector<std::vector<std::string>>;

// Three noisy classes, each marked by its own pair of cue terms.
void cue_problem(std::size_t per_class, std::uint64_t seed, std::vector<SparseVector>& xs,
                 std::vector<std::size_t>& ys, std::size_t& dim) {
  SeededRng rng(seed);
  Docs docs;
  for (std::size_t i = 0; i < 3 * per_class; ++i) {
    const std::size_t c = i % 3;
    std::vector<std::string> d;
    d.push_back("cue" + std::to_string(c) + (rng.below(2) ? "a" : "b"));
    for (int j = 0; j < 4; ++j) d.push_back("w" + std::to_string(rng.below(20)));
    docs.push_back(d);
    ys.push_back(c);
  }
  auto [model, vecs] = tfidf_fit_transform(docs);
  xs = std::move(vecs);
  dim = model.dim();
}

}  // namespace

// ------------------------------------------------------------------ tfidf

TEST(Tfidf, SmoothedIdfByHand) {
  const auto [m, xs] = tfidf_fit_transform(Docs{{"a", "b"}, {"a"}});
  EXPECT_DOUBLE_EQ(m.idf()[*m.find("a")], 1.0);
  EXPECT_DOUBLE_EQ(m.idf()[*m.find("b")], std::log(1.5) + 1.0);
  EXPECT_EQ(m.documents(), 2u);
  EXPECT_EQ(m.document_frequency()[*m.find("a")], 2u);
}

TEST(Tfidf, SingleDocumentHasUnitIdf) {
  const auto [m, xs] = tfidf_fit_transform(Docs{{"x", "y", "y", "z"}});
  for (double w : m.idf()) EXPECT_DOUBLE_EQ(w, 1.0);
  // tf = raw count before normalization: y weighs twice x.
  ASSERT_EQ(xs[0].size(), 3u);
  EXPECT_NEAR(xs[0][*m.find("y")].second, 2.0 / std::sqrt(6.0), 1e-15);
}

TEST(Tfidf, VectorsAreUnitLengthAndEmptyDocIsZero) {
  SeededRng rng(1);
  Docs docs;
  for (int i = 0; i < 50; ++i) {
    std::vector<std::string> d;
    const auto len = rng.below(8);
    for (std::size_t j = 0; j < len; ++j) d.push_back("t" + std::to_string(rng.below(30)));
    docs.push_back(d);
  }
  const auto [m, xs] = tfidf_fit_transform(docs);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].empty()) {
      EXPECT_TRUE(xs[i].empty());
    } else {
      EXPECT_NEAR(norm(xs[i]), 1.0, 1e-9);
    }
  }
  for (double w : m.idf()) EXPECT_GE(w, 0.0);
  EXPECT_TRUE(m.transform({"never-seen"}).empty());
}

TEST(Tfidf, FittingIsDeterministic) {
  const Docs docs = {{"b", "a"}, {"c"}, {"a", "a", "d"}};
  const auto first = tfidf_fit_transform(docs);
  const auto second = tfidf_fit_transform(docs);
  EXPECT_TRUE(first.first == second.first);
  EXPECT_EQ(first.second, second.second);
  EXPECT_EQ(first.first.terms(), (std::vector<std::string>{"a", "b", "c", "d"}));
}

TEST(Tfidf, EmptyCorpusInvalid) {
  EXPECT_EQ(kind_of([] { tfidf_fit_transform(Docs{}); }), ErrorKind::kInvalidInput);
}

// -------------------------------------------------------------------- svm

TEST(Svm, TwoSeparablePoints) {
  const std::vector<SparseVector> xs = {{{0, 1.0}}, {{1, 1.0}}};
  const std::vector<std::size_t> ys = {0, 1};
  SvmConfig c;
  c.lambda = 1e-2;
  c.epochs = 50;
  const auto m = svm_train(xs, ys, 2, c);
  EXPECT_EQ(svm_accuracy(m, xs, ys), 1.0);
}

TEST(Svm, ZeroEpochsPredictsClassZero) {
  const std::vector<SparseVector> xs = {{{0, 1.0}}, {{1, 1.0}}, {{2, 1.0}}};
  SvmConfig c;
  c.epochs = 0;
  const auto m = svm_train(xs, {2, 1, 0}, 3, c);
  for (double w : m.weights.values()) EXPECT_EQ(w, 0.0);
  for (const auto& x : xs) EXPECT_EQ(svm_predict(m, x), 0u);
}

TEST(Svm, HandSetWeightsFavourClassTwo) {
  LinearSvm m;
  m.weights = Matrix<double>(3, 2);
  m.weights(2, 0) = 1.0;
  m.bias = {0, 0, 0};
  const std::vector<double> x{0.5, 0.5};
  EXPECT_EQ(svm_predict(m, std::span<const double>(x)), 2u);
  const std::vector<double> bad{1.0};
  EXPECT_EQ(kind_of([&] { svm_predict(m, std::span<const double>(bad)); }),
            ErrorKind::kInvalidInput);
  EXPECT_EQ(kind_of([&] { svm_predict(m, SparseVector{{5, 1.0}}); }), ErrorKind::kInvalidInput);
}

TEST(Svm, ScalingInputKeepsPredictionWithoutBias) {
  std::vector<SparseVector> xs;
  std::vector<std::size_t> ys;
  std::size_t dim = 0;
  cue_problem(20, 2, xs, ys, dim);
  auto m = svm_train(xs, ys, dim);
  std::fill(m.bias.begin(), m.bias.end(), 0.0);
  for (auto x : xs) {
    const auto before = svm_predict(m, x);
    for (auto& e : x) e.second *= 7.5;
    EXPECT_EQ(svm_predict(m, x), before);
  }
}

TEST(Svm, SingleClassInvalid) {
  const std::vector<SparseVector> xs = {{{0, 1.0}}, {{1, 1.0}}};
  EXPECT_EQ(kind_of([&] { svm_train(xs, {1, 1}, 2); }), ErrorKind::kInvalidInput);
  EXPECT_EQ(kind_of([&] { svm_train(xs, {0, 1}, 1); }), ErrorKind::kInvalidInput);
  SvmConfig c;
  c.lambda = 0;
  EXPECT_EQ(kind_of([&] { svm_train(xs, {0, 1}, 2, c); }), ErrorKind::kConfig);
}

TEST(Svm, LearnsCueWords) {
  std::vector<SparseVector> xs;
  std::vector<std::size_t> ys;
  std::size_t dim = 0;
  cue_problem(40, 3, xs, ys, dim);
  EXPECT_GE(svm_accuracy(svm_train(xs, ys, dim), xs, ys), 0.95);
}

TEST(Svm, HingeSubgradientMatchesFiniteDifferences) {
  SeededRng rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 3 + rng.below(5), n = 4 + rng.below(6);
    std::vector<SparseVector> xs(n);
    std::vector<int> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::uint32_t j = 0; j < dim; ++j) {
        if (rng.below(2)) xs[i].push_back({j, rng.uniform(-1, 1)});
      }
      ys[i] = rng.below(2) ? 1 : -1;
    }
    std::vector<double> w(dim);
    for (auto& v : w) v = rng.uniform(-1, 1);
    double b = rng.uniform(-1, 1);
    const double lambda = rng.uniform(0.01, 1.0);
    // Skip instances with a margin within reach of the probe step.
    bool near_kink = false;
    for (std::size_t i = 0; i < n; ++i) {
      near_kink |= std::abs(1.0 - ys[i] * (sparse_dot(w, xs[i]) + b)) < 1e-3;
    }
    if (near_kink) continue;
    double gb = 0.0;
    const auto g = hinge_subgradient(w, b, xs, ys, lambda, &gb);
    const double h = 1e-6;
    auto rel = [](double fd, double an) {
      return std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
    };
    for (std::size_t j = 0; j < dim; ++j) {
      const double saved = w[j];
      w[j] = saved + h;
      const double up = hinge_objective(w, b, xs, ys, lambda);
      w[j] = saved - h;
      const double down = hinge_objective(w, b, xs, ys, lambda);
      w[j] = saved;
      worst = std::max(worst, rel((up - down) / (2 * h), g[j]));
    }
    const double up = hinge_objective(w, b + h, xs, ys, lambda);
    const double down = hinge_objective(w, b - h, xs, ys, lambda);
    worst = std::max(worst, rel((up - down) / (2 * h), gb));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Svm, OneVsRestDecomposes) {
  std::vector<SparseVector> xs;
  std::vector<std::size_t> ys;
  std::size_t dim = 0;
  cue_problem(15, 5, xs, ys, dim);
  const auto a = svm_train(xs, ys, dim);
  // Swap classes 1 and 2; classifier 0 sees the same binary problem.
  auto swapped = ys;
  for (auto& y : swapped) {
    if (y == 1) {
      y = 2;
    } else if (y == 2) {
      y = 1;
    }
  }
  const auto b = svm_train(xs, swapped, dim);
  for (std::size_t j = 0; j < dim; ++j) EXPECT_EQ(a.weights(0, j), b.weights(0, j));
  EXPECT_EQ(a.bias[0], b.bias[0]);
  for (std::size_t j = 0; j < dim; ++j) EXPECT_EQ(a.weights(1, j), b.weights(2, j));
}

TEST(Svm, SameSeedSameModel) {
  std::vector<SparseVector> xs;
  std::vector<std::size_t> ys;
  std::size_t dim = 0;
  cue_problem(10, 6, xs, ys, dim);
  const auto a = svm_train(xs, ys, dim);
  const auto b = svm_train(xs, ys, dim);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
}
