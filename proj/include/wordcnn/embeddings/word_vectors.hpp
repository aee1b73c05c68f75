#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "wordcnn/error.hpp"
#include "wordcnn/numerics.hpp"

namespace wordcnn::embeddings {

/// Words and their vectors, one row per word, in file order. Words are raw
/// bytes; lookups match bytes exactly.
class WordVectors {
 public:
  WordVectors() = default;
  WordVectors(std::vector<std::string> words, Matrix<float> vectors)
      : words_(std::move(words)), vectors_(std::move(vectors)) {
    require(words_.size() == vectors_.rows(), ErrorKind::kInvalidInput,
            "word vectors: word count does not match matrix rows");
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
  }

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }
  bool empty() const noexcept { return words_.empty(); }

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::string& word(std::size_t i) const { return words_.at(i); }
  const Matrix<float>& matrix() const noexcept { return vectors_; }

  std::optional<std::size_t> find(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require_index(const std::string& word) const {
    auto i = find(word);
    if (!i) fail(ErrorKind::kNotFound, "word not in vocabulary: " + word);
    return *i;
  }

  std::span<const float> vector(std::size_t i) const { return vectors_.row(i); }

  /// Copy with every non-zero row scaled to unit L2 norm.
  WordVectors normalized() const {
    Matrix<float> m = vectors_;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      double sq = 0.0;
      for (float x : row) sq += static_cast<double>(x) * x;
      if (sq == 0.0) continue;
      const double inv = 1.0 / std::sqrt(sq);
      for (auto& x : row) x = static_cast<float>(x * inv);
    }
    return WordVectors(words_, std::move(m));
  }

 private:
  std::vector<std::string> words_;
  Matrix<float> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace wordcnn::embeddings
