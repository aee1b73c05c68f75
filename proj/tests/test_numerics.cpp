#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "wordcnn/numerics.hpp"

using namespace wordcnn;

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

}  // namespace

TEST(Sigmoid, SymmetryPoint) { EXPECT_EQ(sigmoid(0.0), 0.5); }

TEST(Sigmoid, SaturatesWithoutOverflow) {
  EXPECT_NEAR(sigmoid(40.0), 1.0, 1e-15);
  EXPECT_TRUE(std::isfinite(sigmoid(1e6)));
  EXPECT_TRUE(std::isfinite(sigmoid(-1e6)));
  EXPECT_EQ(sigmoid(-1e6), 0.0);
  EXPECT_TRUE(std::isfinite(log_sigmoid(-1e6)));
}

TEST(Sigmoid, ClosedFormAtLn3) { EXPECT_NEAR(sigmoid(std::log(3.0)), 0.75, 1e-15); }

TEST(Sigmoid, ComplementIdentity) {
  SeededRng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-30, 30);
    EXPECT_NEAR(sigmoid(-x), 1.0 - sigmoid(x), 1e-15);
    const double s = sigmoid(x);
    EXPECT_GT(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(SoftmaxCrossEntropy, UniformTwoClasses) {
  const std::vector<double> logits{0.3, 0.3};
  EXPECT_NEAR(softmax_cross_entropy<double>(logits, 1).loss, std::log(2.0), 1e-15);
}

TEST(SoftmaxCrossEntropy, UniformSixClasses) {
  const std::vector<double> logits(6, -2.0);
  EXPECT_NEAR(softmax_cross_entropy<double>(logits, 4).loss, std::log(6.0), 1e-14);
}

TEST(SoftmaxCrossEntropy, LargeLogitsStayFinite) {
  const std::vector<double> logits{1000.0, 0.0};
  const auto r = softmax_cross_entropy<double>(logits, 0);
  // log(1 + e^-1000) in extended precision underflows to 0.
  const long double oracle = std::log1p(std::exp(-1000.0L));
  EXPECT_NEAR(r.loss, static_cast<double>(oracle), 1e-300);
  EXPECT_TRUE(std::isfinite(softmax_cross_entropy<double>(logits, 1).loss));
  EXPECT_NEAR(softmax_cross_entropy<double>(logits, 1).loss, 1000.0, 1e-9);
}

TEST(SoftmaxCrossEntropy, ProbabilitiesNormalizedAndShiftInvariant) {
  SeededRng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> logits(2 + rng.below(8));
    for (auto& x : logits) x = rng.uniform(-20, 20);
    const std::size_t label = rng.below(logits.size());
    const auto a = softmax_cross_entropy<double>(logits, label);
    double sum = 0.0;
    for (double p : a.probabilities) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(a.loss, -std::log(a.probabilities[label]), 1e-12);
    const double shift = rng.uniform(-100, 100);
    for (auto& x : logits) x += shift;
    const auto b = softmax_cross_entropy<double>(logits, label);
    for (std::size_t i = 0; i < logits.size(); ++i) {
      EXPECT_NEAR(a.probabilities[i], b.probabilities[i], 1e-12);
    }
  }
}

TEST(SoftmaxCrossEntropy, RejectsEmptyAndBadLabel) {
  const std::vector<double> empty;
  EXPECT_EQ(kind_of([&] { softmax_cross_entropy<double>(empty, 0); }),
            ErrorKind::kInvalidInput);
  const std::vector<double> two{1.0, 2.0};
  EXPECT_EQ(kind_of([&] { softmax_cross_entropy<double>(two, 2); }),
            ErrorKind::kInvalidInput);
}

TEST(Adam, ZeroGradientIsIdentity) {
  SeededRng rng(5);
  Matrix<double> p(3, 4);
  fill_uniform(p.values(), rng, -1, 1);
  const auto before = p;
  AdamState<double> st;
  const Matrix<double> g(3, 4);
  for (int i = 0; i < 100; ++i) adam_step(p, g, st, 0.001);
  EXPECT_EQ(p, before);
  EXPECT_EQ(st.step, 100u);
}

TEST(Adam, FirstStepHandComputed) {
  Matrix<double> p(1, 1, 0.0);
  Matrix<double> g(1, 1, 2.0);
  AdamState<double> st;
  adam_step(p, g, st, 0.001);
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  EXPECT_NEAR(p(0, 0), -0.001 * 2.0 / (2.0 + 1e-8), 1e-15);
  EXPECT_NEAR(p(0, 0), -0.001, 1e-11);
  EXPECT_EQ(st.step, 1u);
}

TEST(Adam, FirstStepMovesBySignOfGradient) {
  SeededRng rng(8);
  Matrix<double> p(5, 5), g(5, 5);
  fill_uniform(p.values(), rng, -1, 1);
  fill_uniform(g.values(), rng, -3, 3);
  const auto before = p;
  AdamState<double> st;
  adam_step(p, g, st, 0.01);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double expect = -0.01 * (g[i] > 0 ? 1.0 : -1.0);
    EXPECT_NEAR(p[i] - before[i], expect, 0.01 * 1e-6);
  }
}

TEST(Adam, StepCounterAndMomentInvariants) {
  SeededRng rng(9);
  Matrix<double> p(2, 3), g(2, 3);
  AdamState<double> st;
  for (int i = 1; i <= 20; ++i) {
    fill_uniform(g.values(), rng, -1, 1);
    adam_step(p, g, st, 0.001);
    EXPECT_EQ(st.step, static_cast<std::uint64_t>(i));
    EXPECT_TRUE(st.first_moment.same_shape(p));
    for (double v : st.second_moment.values()) EXPECT_GE(v, 0.0);
    EXPECT_TRUE(p.all_finite());
  }
}

TEST(Adam, KeepsCustomBetas) {
  Matrix<double> p(1, 1, 0.0), g(1, 1, 1.0);
  AdamState<double> st;
  st.beta1 = 0.5;
  adam_step(p, g, st, 0.1);
  EXPECT_EQ(st.beta1, 0.5);
  adam_step(p, g, st, 0.1);
  EXPECT_NEAR(p(0, 0), -0.2, 1e-6);
}

TEST(Adam, RejectsShapeMismatch) {
  Matrix<double> p(2, 2), g(2, 3);
  AdamState<double> st;
  EXPECT_EQ(kind_of([&] { adam_step(p, g, st, 0.001); }), ErrorKind::kInvalidInput);
}

TEST(LrSchedule, PlateausAfterEightAndSixteen) {
  const LrSchedule s;
  for (int e = 1; e <= 8; ++e) EXPECT_EQ(s.rate(e), 0.001);
  EXPECT_EQ(s.rate(9), 0.0005);
  EXPECT_EQ(s.rate(16), 0.0005);
  EXPECT_EQ(s.rate(17), 0.00005);
  EXPECT_EQ(s.rate(25), 0.00005);
}

TEST(LrSchedule, NonIncreasingWithThreeValues) {
  const LrSchedule s;
  std::set<double> values;
  for (int e = 1; e <= 100; ++e) {
    values.insert(s.rate(e));
    if (e > 1) EXPECT_LE(s.rate(e), s.rate(e - 1));
  }
  EXPECT_EQ(values, (std::set<double>{0.001, 0.0005, 0.00005}));
}

TEST(FiniteDiff, QuadraticIsExact) {
  Matrix<double> x(1, 1, 3.0);
  const Matrix<double> g(1, 1, 6.0);
  const double err = finite_diff_check<double>([&] { return x[0] * x[0]; }, x, g);
  EXPECT_LT(err, 1e-8);
  EXPECT_EQ(x[0], 3.0);
}

TEST(FiniteDiff, ConstantGivesZero) {
  Matrix<double> x(2, 2, 1.0);
  const Matrix<double> g(2, 2);
  EXPECT_EQ(finite_diff_check<double>([] { return 4.0; }, x, g), 0.0);
}

TEST(FiniteDiff, NonFiniteLossIsOracleFailure) {
  Matrix<double> x(1, 1, 1.0);
  const Matrix<double> g(1, 1);
  EXPECT_EQ(kind_of([&] {
              finite_diff_check<double>(
                  [] { return std::numeric_limits<double>::quiet_NaN(); }, x, g);
            }),
            ErrorKind::kOracleFailure);
}

TEST(FiniteDiff, DetectsWrongGradient) {
  Matrix<double> x(1, 2, 1.0);
  Matrix<double> g(1, 2);
  g[0] = 2.0;
  g[1] = 5.0;  // true value 2
  const double err = finite_diff_check<double>([&] { return x[0] * x[0] + x[1] * x[1]; }, x, g);
  EXPECT_NEAR(err, 3.0 / 5.0, 1e-6);
}

TEST(SeededRng, EqualSeedsGiveEqualStreams) {
  SeededRng a(42), b(42);
  bool same = true;
  for (int i = 0; i < 1'000'000; ++i) same &= a.next_u64() == b.next_u64();
  EXPECT_TRUE(same);
}

TEST(SeededRng, DifferentSeedsDiffer) {
  SeededRng a(1), b(2);
  EXPECT_NE(a.next_u64(), b.next_u64());
  EXPECT_NE(SeededRng(1).derive(1), SeededRng(1).derive(2));
  EXPECT_EQ(SeededRng(1).derive(1), SeededRng(1).derive(1));
}

TEST(SeededRng, BelowIsInRangeAndRoughlyUniform) {
  SeededRng rng(7);
  std::vector<int> hist(6, 0);
  for (int i = 0; i < 60000; ++i) ++hist[rng.below(6)];
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
  EXPECT_EQ(kind_of([&] { rng.below(0); }), ErrorKind::kInvalidInput);
}

TEST(SeededRng, UniformStaysInUnitInterval) {
  SeededRng rng(13);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Matrix, ShapeAndFiniteness) {
  Matrix<float> m(2, 3, 1.5f);
  EXPECT_EQ(m.size(), 6u);
  EXPECT_EQ(m.row(1).size(), 3u);
  EXPECT_TRUE(m.all_finite());
  m(1, 2) = std::numeric_limits<float>::infinity();
  EXPECT_FALSE(m.all_finite());
  const auto d = matrix_cast<double>(Matrix<float>(2, 2, 0.25f));
  EXPECT_EQ(d(1, 1), 0.25);
}
