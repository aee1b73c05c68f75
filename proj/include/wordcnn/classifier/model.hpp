#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "wordcnn/classifier/config.hpp"
#include "wordcnn/embeddings/word_vectors.hpp"
#include "wordcnn/error.hpp"
#include "wordcnn/numerics.hpp"
#include "wordcnn/text/vocabulary.hpp"

namespace wordcnn::classifier {

using text::Vocabulary;
using text::WordId;

/// Filters of one width: `weights` is maps x (width * k), each row the
/// flattened window (word-major) it is dotted with.
template <typename T>
struct FilterBank {
  std::size_t width = 0;
  Matrix<T> weights;
  Matrix<T> bias;  // 1 x maps
};

template <typename T>
struct CnnModel {
  Matrix<T> embeddings;  // vocab.size() x k; row 0 (padding) is always zero
  std::vector<FilterBank<T>> banks;
  Matrix<T> final_weights;  // classes x penultimate
  Matrix<T> final_bias;     // 1 x classes

  std::size_t embedding_dim() const noexcept { return embeddings.cols(); }
  std::size_t class_count() const noexcept { return final_weights.rows(); }
  std::size_t penultimate_dim() const noexcept { return final_weights.cols(); }
  std::size_t feature_maps() const noexcept {
    return banks.empty() ? 0 : banks.front().weights.rows();
  }
  std::size_t max_width() const noexcept {
    return banks.empty() ? 0 : banks.back().width;
  }
};

template <typename T>
struct EmbeddingInit {
  Matrix<T> embeddings;
  std::size_t random_rows = 0;  // word rows without a pretrained vector
};

/// First-layer table. rand: every word row ~ U[-r, r]. static/non-static:
/// rows of words present in `pretrained` are copied, the rest ~ U[-r, r].
/// The padding row is zero; the unknown row is random.
template <typename T>
EmbeddingInit<T> init_embeddings(const Vocabulary& vocab, Variant variant,
                                 const embeddings::WordVectors* pretrained,
                                 std::size_t dim, double range, SeededRng& rng) {
  if (uses_pretrained(variant)) {
    require(pretrained != nullptr, ErrorKind::kConfig,
            std::string("variant ") + std::string(to_string(variant)) +
                " needs pretrained vectors");
    require(pretrained->dim() == dim, ErrorKind::kConfig,
            "pretrained vectors have dimension " + std::to_string(pretrained->dim()) +
                ", config expects " + std::to_string(dim));
  }
  EmbeddingInit<T> out;
  out.embeddings = Matrix<T>(vocab.size(), dim);
  for (std::size_t id = Vocabulary::kUnk; id < vocab.size(); ++id) {
    auto row = out.embeddings.row(id);
    std::optional<std::size_t> hit;
    if (uses_pretrained(variant) && id >= Vocabulary::kReserved) {
      hit = pretrained->find(vocab.token_of(static_cast<WordId>(id)));
    }
    if (hit) {
      const auto src = pretrained->vector(*hit);
      for (std::size_t i = 0; i < dim; ++i) row[i] = static_cast<T>(src[i]);
    } else {
      fill_uniform(row, rng, -range, range);
      if (id >= Vocabulary::kReserved) ++out.random_rows;
    }
  }
  return out;
}

/// Builds a model with Glorot-uniform filters, zero filter biases and a
/// zero final layer around the given embedding table.
template <typename T>
CnnModel<T> init_model(Matrix<T> embedding_table, const CnnConfig& config,
                       std::size_t classes, SeededRng& rng) {
  config.validate();
  require(classes >= 2, ErrorKind::kInvalidInput, "cnn: need at least two classes");
  CnnModel<T> m;
  m.embeddings = std::move(embedding_table);
  std::fill(m.embeddings.row(Vocabulary::kPad).begin(),
            m.embeddings.row(Vocabulary::kPad).end(), T{0});
  const std::size_t k = m.embeddings.cols();
  for (auto width : config.filter_widths) {
    FilterBank<T> bank;
    bank.width = width;
    bank.weights = Matrix<T>(config.feature_maps, width * k);
    bank.bias = Matrix<T>(1, config.feature_maps);
    const double fan_in = static_cast<double>(width * k);
    const double fan_out = static_cast<double>(config.feature_maps * width);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    fill_uniform(bank.weights.values(), rng, -bound, bound);
    m.banks.push_back(std::move(bank));
  }
  m.final_weights = Matrix<T>(classes, config.penultimate_dim());
  m.final_bias = Matrix<T>(1, classes);
  return m;
}

/// Gradients with the same layout as the model.
template <typename T>
struct CnnGradients {
  Matrix<T> embeddings;  // empty when the embedding table is frozen
  std::vector<Matrix<T>> bank_weights;
  std::vector<Matrix<T>> bank_bias;
  Matrix<T> final_weights;
  Matrix<T> final_bias;

  static CnnGradients zeros_like(const CnnModel<T>& m, bool with_embeddings) {
    CnnGradients g;
    if (with_embeddings) g.embeddings = Matrix<T>(m.embeddings.rows(), m.embeddings.cols());
    for (const auto& b : m.banks) {
      g.bank_weights.emplace_back(b.weights.rows(), b.weights.cols());
      g.bank_bias.emplace_back(b.bias.rows(), b.bias.cols());
    }
    g.final_weights = Matrix<T>(m.final_weights.rows(), m.final_weights.cols());
    g.final_bias = Matrix<T>(m.final_bias.rows(), m.final_bias.cols());
    return g;
  }
};

}  // namespace wordcnn::classifier
