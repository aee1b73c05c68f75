#pragma once

// Dense matrices, seeded randomness, Adam and the finite-difference oracle.
// Everything is templated on the scalar so training can run in float while
// gradient tests instantiate the same code with double.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "wordcnn/error.hpp"

namespace wordcnn {

/// Row-major dense matrix with value semantics.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{0})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](T x) { return std::isfinite(x); });
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <typename To, typename From>
Matrix<To> matrix_cast(const Matrix<From>& m) {
  Matrix<To> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = static_cast<To>(m[i]);
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic generator. All derived quantities (uniform reals, bounded
/// integers, shuffles) are computed here rather than through <random>
/// distributions so the draw sequence does not depend on the standard
/// library in use.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) fail(ErrorKind::kInvalidInput, "SeededRng::below(0)");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      using std::swap;
      swap(first[i - 1], first[below(i)]);
    }
  }

  /// Independent child seed, e.g. one per CV fold.
  std::uint64_t derive(std::uint64_t stream) const {
    return splitmix64(seed_ ^ splitmix64(stream + 1));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

template <typename T>
void fill_uniform(std::span<T> out, SeededRng& rng, double lo, double hi) {
  for (auto& x : out) x = static_cast<T>(rng.uniform(lo, hi));
}

/// Logistic function, evaluated on the branch that cannot overflow.
template <typename T>
T sigmoid(T x) {
  if (x >= T{0}) {
    return T{1} / (T{1} + std::exp(-x));
  }
  const T e = std::exp(x);
  return e / (T{1} + e);
}

/// log(sigmoid(x)) without cancellation for large |x|.
template <typename T>
T log_sigmoid(T x) {
  if (x >= T{0}) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

template <typename T>
struct SoftmaxResult {
  T loss;
  std::vector<T> probabilities;
};

/// Cross-entropy of softmax(logits) against `label`, max-shifted.
template <typename T>
SoftmaxResult<T> softmax_cross_entropy(std::span<const T> logits,
                                       std::size_t label) {
  require(!logits.empty(), ErrorKind::kInvalidInput,
          "softmax_cross_entropy: empty logits");
  require(label < logits.size(), ErrorKind::kInvalidInput,
          "softmax_cross_entropy: label out of range");
  const T shift = *std::max_element(logits.begin(), logits.end());
  SoftmaxResult<T> out{T{0}, std::vector<T>(logits.size())};
  T sum = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.probabilities[i] = std::exp(logits[i] - shift);
    sum += out.probabilities[i];
  }
  for (auto& p : out.probabilities) p /= sum;
  out.loss = std::log(sum) - (logits[label] - shift);
  return out;
}

template <typename T>
struct AdamState {
  Matrix<T> first_moment;
  Matrix<T> second_moment;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  explicit AdamState(const Matrix<T>& like)
      : first_moment(like.rows(), like.cols()),
        second_moment(like.rows(), like.cols()) {}
};

/// One bias-corrected Adam update of `param` in place.
template <typename T>
void adam_step(Matrix<T>& param, const Matrix<T>& grad, AdamState<T>& state,
               double lr) {
  require(param.same_shape(grad), ErrorKind::kInvalidInput,
          "adam_step: gradient shape does not match parameter");
  require(lr > 0.0, ErrorKind::kInvalidInput, "adam_step: lr must be > 0");
  if (state.first_moment.empty() && !param.empty()) {
    state.first_moment = Matrix<T>(param.rows(), param.cols());
    state.second_moment = Matrix<T>(param.rows(), param.cols());
  }
  require(param.same_shape(state.first_moment) &&
              param.same_shape(state.second_moment),
          ErrorKind::kInvalidInput, "adam_step: state shape mismatch");

  ++state.step;
  const auto t = static_cast<double>(state.step);
  const T b1 = static_cast<T>(state.beta1);
  const T b2 = static_cast<T>(state.beta2);
  const T c1 = static_cast<T>(1.0 / (1.0 - std::pow(state.beta1, t)));
  const T c2 = static_cast<T>(1.0 / (1.0 - std::pow(state.beta2, t)));
  const T rate = static_cast<T>(lr);
  const T eps = static_cast<T>(state.epsilon);

  T* p = param.data();
  const T* g = grad.data();
  T* m = state.first_moment.data();
  T* v = state.second_moment.data();
  const std::size_t n = param.size();
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (T{1} - b1) * g[i];
    v[i] = b2 * v[i] + (T{1} - b2) * g[i] * g[i];
    const T m_hat = m[i] * c1;
    const T v_hat = v[i] * c2;
    p[i] -= rate * m_hat / (std::sqrt(v_hat) + eps);
  }
}

/// Piecewise-constant learning rate over 1-based epochs.
struct LrSchedule {
  double base = 0.001;
  double second = 0.0005;
  double third = 0.00005;
  int first_boundary = 8;    // epochs 1..8 use `base`
  int second_boundary = 16;  // epochs 9..16 use `second`, later `third`

  double rate(int epoch) const {
    if (epoch <= first_boundary) return base;
    if (epoch <= second_boundary) return second;
    return third;
  }
};

/// Max relative error between central finite differences of `loss_fn` and
/// `analytic` over every coordinate of `param`. `param` is perturbed in
/// place and restored.
template <typename T>
double finite_diff_check(const std::type_identity_t<std::function<T()>>& loss_fn,
                         Matrix<T>& param, const Matrix<T>& analytic,
                         std::type_identity_t<T> h = T(1e-5)) {
  require(param.same_shape(analytic), ErrorKind::kInvalidInput,
          "finite_diff_check: gradient shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const T saved = param[i];
    param[i] = saved + h;
    const T up = loss_fn();
    param[i] = saved - h;
    const T down = loss_fn();
    param[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      fail(ErrorKind::kOracleFailure,
           "finite_diff_check: non-finite loss at coordinate " +
               std::to_string(i));
    }
    const double fd = (static_cast<double>(up) - static_cast<double>(down)) /
                      (2.0 * static_cast<double>(h));
    const double an = static_cast<double>(analytic[i]);
    const double denom = std::max({std::abs(fd), std::abs(an), 1e-8});
    worst = std::max(worst, std::abs(fd - an) / denom);
  }
  return worst;
}

template <typename T>
T dot(std::span<const T> a, std::span<const T> b) {
  T s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace wordcnn
