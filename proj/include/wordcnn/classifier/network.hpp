#pragma once

// Forward and backward passes of the convolutional sentence classifier:
// embedding lookup -> per-width convolution + ReLU -> max over time ->
// dropout -> affine -> softmax.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "wordcnn/classifier/model.hpp"
#include "wordcnn/error.hpp"
#include "wordcnn/numerics.hpp"
#include "wordcnn/text/dataset.hpp"

namespace wordcnn::classifier {

/// Sentences as id rows of length n + l_h - 1: l_h - 1 padding ids, the
/// tokens (at most n), then padding to the end.
struct EncodedBatch {
  std::size_t max_length = 0;  // n
  std::size_t max_width = 0;   // l_h
  std::vector<WordId> ids;     // size() x row_length(), row-major
  std::vector<std::size_t> lengths;
  std::vector<std::size_t> labels;
  std::size_t truncated = 0;   // sentences cut to n

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t left_pad() const noexcept { return max_width - 1; }
  std::size_t row_length() const noexcept { return max_length + max_width - 1; }
  std::span<const WordId> row(std::size_t b) const {
    return {ids.data() + b * row_length(), row_length()};
  }
};

inline EncodedBatch encode_batch(std::span<const text::Example* const> examples,
                                 std::size_t max_length, std::size_t max_width) {
  require(max_width >= 1 && max_length >= 1, ErrorKind::kInvalidInput,
          "encode_batch: n and l_h must be positive");
  EncodedBatch batch;
  batch.max_length = max_length;
  batch.max_width = max_width;
  batch.ids.assign(examples.size() * batch.row_length(), Vocabulary::kPad);
  for (std::size_t b = 0; b < examples.size(); ++b) {
    const auto& ex = *examples[b];
    require(!ex.tokens.empty(), ErrorKind::kInvalidInput, "encode_batch: empty example");
    std::size_t len = ex.tokens.size();
    if (len > max_length) {
      len = max_length;
      ++batch.truncated;
    }
    std::copy_n(ex.tokens.begin(), len,
                batch.ids.begin() + static_cast<std::ptrdiff_t>(b * batch.row_length() +
                                                                batch.left_pad()));
    batch.lengths.push_back(len);
    batch.labels.push_back(ex.label);
  }
  return batch;
}

inline EncodedBatch encode_batch(const std::vector<const text::Example*>& examples,
                                 std::size_t max_length, std::size_t max_width) {
  return encode_batch(std::span<const text::Example* const>(examples), max_length,
                      max_width);
}

/// Inverted-dropout masks, one row per sentence, entries 0 or 1/(1-p).
template <typename T>
Matrix<T> draw_dropout_masks(std::size_t batch, std::size_t features, double p,
                             SeededRng& rng) {
  Matrix<T> masks(batch, features, T{1});
  if (p <= 0.0) return masks;
  const T keep = static_cast<T>(1.0 / (1.0 - p));
  for (auto& x : masks.values()) x = rng.uniform() < p ? T{0} : keep;
  return masks;
}

template <typename T>
struct ForwardCache {
  std::size_t batch = 0;
  Matrix<T> penultimate;  // pooled features before dropout
  Matrix<T> dropped;      // after the mask (== penultimate at inference)
  Matrix<T> masks;        // empty at inference
  Matrix<T> logits;
  // Per bank, sentence, filter: conceptual window start of the max and
  // whether the pooled value is positive (gradient flows only then).
  std::vector<std::vector<std::uint32_t>> argmax;
  std::vector<std::vector<std::uint8_t>> active;
};

namespace detail {

template <typename T>
using RowMajor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace detail

/// Runs the network. `masks` (batch x penultimate) is applied when given,
/// which is how training enables dropout; pass nullptr at inference.
template <typename T>
ForwardCache<T> forward(const CnnModel<T>& model, const EncodedBatch& batch,
                        const Matrix<T>* masks = nullptr) {
  const std::size_t B = batch.size();
  const std::size_t k = model.embedding_dim();
  const std::size_t P = batch.left_pad();
  const std::size_t L = batch.row_length();
  const std::size_t maps = model.feature_maps();
  const std::size_t F = model.penultimate_dim();
  const std::size_t C = model.class_count();
  require(B > 0, ErrorKind::kInvalidInput, "forward: empty batch");
  require(model.banks.size() * maps == F, ErrorKind::kInternal,
          "forward: penultimate size does not match filter banks");
  require(batch.max_width >= model.max_width(), ErrorKind::kConfig,
          "forward: batch padded for narrower filters than the model uses");
  for (const auto& bank : model.banks) {
    require(bank.width <= L, ErrorKind::kConfig,
            "forward: filter width exceeds padded sentence length");
  }
  if (masks) {
    require(masks->rows() == B && masks->cols() == F, ErrorKind::kInternal,
            "forward: dropout mask shape mismatch");
  }

  // Compact layout: each sentence contributes its P leading pads and its
  // tokens; one trailing block of P pads closes the buffer. Any window of
  // width <= P + 1 sees at most one sentence, and every window of the
  // conceptual padded row either maps into this buffer or lies entirely in
  // padding (value = bias).
  std::vector<std::size_t> offset(B);
  std::size_t rows = 0;
  for (std::size_t b = 0; b < B; ++b) {
    offset[b] = rows;
    rows += P + batch.lengths[b];
  }
  rows += P;
  detail::RowMajor<T> buffer = detail::RowMajor<T>::Zero(static_cast<Eigen::Index>(rows),
                                                         static_cast<Eigen::Index>(k));
  for (std::size_t b = 0; b < B; ++b) {
    const auto ids = batch.row(b);
    for (std::size_t t = 0; t < batch.lengths[b]; ++t) {
      const WordId id = ids[P + t];
      require(id < model.embeddings.rows(), ErrorKind::kInvalidInput,
              "forward: word id outside embedding table");
      const auto src = model.embeddings.row(id);
      std::copy(src.begin(), src.end(),
                buffer.data() + (offset[b] + P + t) * k);
    }
  }

  ForwardCache<T> cache;
  cache.batch = B;
  cache.penultimate = Matrix<T>(B, F);
  cache.argmax.resize(model.banks.size());
  cache.active.resize(model.banks.size());

  for (std::size_t bi = 0; bi < model.banks.size(); ++bi) {
    const auto& bank = model.banks[bi];
    const std::size_t h = bank.width;
    const std::size_t windows = rows - h + 1;
    using Strided = Eigen::Map<const detail::RowMajor<T>, 0, Eigen::OuterStride<>>;
    Strided x(buffer.data(), static_cast<Eigen::Index>(windows),
              static_cast<Eigen::Index>(h * k), Eigen::OuterStride<>(static_cast<Eigen::Index>(k)));
    Eigen::Map<const detail::RowMajor<T>> w(bank.weights.data(),
                                            static_cast<Eigen::Index>(maps),
                                            static_cast<Eigen::Index>(h * k));
    detail::RowMajor<T> z(static_cast<Eigen::Index>(windows), static_cast<Eigen::Index>(maps));
    z.noalias() = x * w.transpose();

    auto& argmax = cache.argmax[bi];
    auto& active = cache.active[bi];
    argmax.assign(B * maps, 0);
    active.assign(B * maps, 0);
    const std::size_t last_position = L - h;  // conceptual window starts 0..L-h
    for (std::size_t b = 0; b < B; ++b) {
      const std::size_t covered_last =
          std::min(last_position, 2 * P + batch.lengths[b] - h);
      for (std::size_t f = 0; f < maps; ++f) {
        const T bias = bank.bias[f];
        T best = z(static_cast<Eigen::Index>(offset[b]), static_cast<Eigen::Index>(f)) + bias;
        std::uint32_t best_p = 0;
        for (std::size_t p = 1; p <= covered_last; ++p) {
          const T v = z(static_cast<Eigen::Index>(offset[b] + p), static_cast<Eigen::Index>(f)) + bias;
          if (v > best) {
            best = v;
            best_p = static_cast<std::uint32_t>(p);
          }
        }
        if (covered_last < last_position && bias > best) {
          best = bias;
          best_p = static_cast<std::uint32_t>(covered_last + 1);
        }
        const bool on = best > T{0};
        cache.penultimate(b, bi * maps + f) = on ? best : T{0};
        argmax[b * maps + f] = best_p;
        active[b * maps + f] = on ? 1 : 0;
      }
    }
  }

  if (masks) {
    cache.masks = *masks;
    cache.dropped = cache.penultimate;
    for (std::size_t i = 0; i < cache.dropped.size(); ++i) cache.dropped[i] *= (*masks)[i];
  } else {
    cache.dropped = cache.penultimate;
  }

  cache.logits = Matrix<T>(B, C);
  for (std::size_t b = 0; b < B; ++b) {
    const auto hrow = cache.dropped.row(b);
    for (std::size_t c = 0; c < C; ++c) {
      cache.logits(b, c) = dot<T>(model.final_weights.row(c), hrow) + model.final_bias[c];
    }
  }
  return cache;
}

/// Mean cross-entropy over the batch plus (l2 / 2) * (|W|^2 + |b|^2) of the
/// final layer.
template <typename T>
T loss(const Matrix<T>& logits, std::span<const std::size_t> labels,
       const CnnModel<T>& model, double l2) {
  require(logits.rows() > 0 && logits.rows() == labels.size(), ErrorKind::kInvalidInput,
          "loss: empty batch or label count mismatch");
  T total = 0;
  for (std::size_t b = 0; b < logits.rows(); ++b) {
    total += softmax_cross_entropy<T>(logits.row(b), labels[b]).loss;
  }
  T value = total / static_cast<T>(logits.rows());
  if (l2 > 0.0) {
    T sq = 0;
    for (T w : model.final_weights.values()) sq += w * w;
    for (T w : model.final_bias.values()) sq += w * w;
    value += static_cast<T>(0.5 * l2) * sq;
  }
  return value;
}

/// Gradients of loss() at the cached forward pass. The max routes each
/// pooled feature's gradient to its single argmax window; the padding row
/// never receives gradient; with `train_embeddings` false no embedding
/// gradient is produced.
template <typename T>
CnnGradients<T> backward(const CnnModel<T>& model, const ForwardCache<T>& cache,
                         const EncodedBatch& batch, double l2, bool train_embeddings) {
  const std::size_t B = cache.batch;
  const std::size_t k = model.embedding_dim();
  const std::size_t maps = model.feature_maps();
  const std::size_t F = model.penultimate_dim();
  const std::size_t C = model.class_count();
  require(B == batch.size() && cache.logits.rows() == B && cache.logits.cols() == C &&
              cache.penultimate.cols() == F && cache.argmax.size() == model.banks.size(),
          ErrorKind::kInternal, "backward: cache does not match model/batch");

  auto grads = CnnGradients<T>::zeros_like(model, train_embeddings);
  const T inv_b = T{1} / static_cast<T>(B);

  Matrix<T> dlogits(B, C);
  for (std::size_t b = 0; b < B; ++b) {
    const auto sm = softmax_cross_entropy<T>(cache.logits.row(b), batch.labels[b]);
    for (std::size_t c = 0; c < C; ++c) {
      dlogits(b, c) = (sm.probabilities[c] - (c == batch.labels[b] ? T{1} : T{0})) * inv_b;
    }
  }

  Matrix<T> dfeatures(B, F);
  for (std::size_t b = 0; b < B; ++b) {
    const auto hrow = cache.dropped.row(b);
    for (std::size_t c = 0; c < C; ++c) {
      const T g = dlogits(b, c);
      if (g == T{0}) continue;
      auto gw = grads.final_weights.row(c);
      const auto w = model.final_weights.row(c);
      for (std::size_t j = 0; j < F; ++j) {
        gw[j] += g * hrow[j];
        dfeatures(b, j) += g * w[j];
      }
      grads.final_bias[c] += g;
    }
  }
  if (l2 > 0.0) {
    const T lambda = static_cast<T>(l2);
    for (std::size_t i = 0; i < grads.final_weights.size(); ++i) {
      grads.final_weights[i] += lambda * model.final_weights[i];
    }
    for (std::size_t i = 0; i < grads.final_bias.size(); ++i) {
      grads.final_bias[i] += lambda * model.final_bias[i];
    }
  }
  if (!cache.masks.empty()) {
    for (std::size_t i = 0; i < dfeatures.size(); ++i) dfeatures[i] *= cache.masks[i];
  }

  for (std::size_t bi = 0; bi < model.banks.size(); ++bi) {
    const auto& bank = model.banks[bi];
    const std::size_t h = bank.width;
    auto& gw = grads.bank_weights[bi];
    auto& gb = grads.bank_bias[bi];
    for (std::size_t b = 0; b < B; ++b) {
      const auto ids = batch.row(b);
      for (std::size_t f = 0; f < maps; ++f) {
        if (!cache.active[bi][b * maps + f]) continue;
        const T g = dfeatures(b, bi * maps + f);
        if (g == T{0}) continue;
        gb[f] += g;
        const std::size_t p = cache.argmax[bi][b * maps + f];
        auto gw_row = gw.row(f);
        const auto w_row = bank.weights.row(f);
        for (std::size_t s = 0; s < h; ++s) {
          const WordId id = ids[p + s];
          if (id == Vocabulary::kPad) continue;
          const auto x = model.embeddings.row(id);
          for (std::size_t i = 0; i < k; ++i) gw_row[s * k + i] += g * x[i];
          if (train_embeddings) {
            auto ge = grads.embeddings.row(id);
            for (std::size_t i = 0; i < k; ++i) ge[i] += g * w_row[s * k + i];
          }
        }
      }
    }
  }
  return grads;
}

/// Index of the largest logit, lowest index on ties.
template <typename T>
std::size_t argmax_row(std::span<const T> row) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

}  // namespace wordcnn::classifier
