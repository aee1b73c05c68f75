#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "wordcnn/error.hpp"
#include "wordcnn/numerics.hpp"
#include "wordcnn/text/vocabulary.hpp"

namespace wordcnn::embeddings {

using text::WordId;

/// Negative-sampling distribution P(w) proportional to count(w)^alpha,
/// stored as an exact cumulative distribution over word ids.
class NoiseTable {
 public:
  NoiseTable() = default;

  /// `counts[id]` for every id; ids listed in `excluded` get probability 0.
  NoiseTable(std::span<const std::uint64_t> counts, double alpha,
             std::span<const WordId> excluded = {}) {
    std::vector<double> weight(counts.size(), 0.0);
    for (std::size_t id = 0; id < counts.size(); ++id) {
      if (counts[id] > 0) weight[id] = std::pow(static_cast<double>(counts[id]), alpha);
    }
    for (auto id : excluded) {
      if (id < weight.size()) weight[id] = 0.0;
    }
    double total = 0.0;
    for (double w : weight) total += w;
    require(total > 0.0, ErrorKind::kInvalidInput,
            "noise table: all counts are zero");
    cdf_.resize(weight.size());
    double running = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) {
      running += weight[i];
      cdf_[i] = running / total;
    }
    cdf_.back() = 1.0;
  }

  std::size_t size() const noexcept { return cdf_.size(); }

  double probability(WordId id) const {
    require(id < cdf_.size(), ErrorKind::kInvalidInput, "noise table: id out of range");
    return id == 0 ? cdf_[0] : cdf_[id] - cdf_[id - 1];
  }

  WordId sample(SeededRng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    // Skip zero-probability ids that share the CDF value of their neighbour.
    auto id = static_cast<WordId>(it - cdf_.begin());
    while (probability(id) == 0.0 && id + 1 < cdf_.size()) ++id;
    return id;
  }

 private:
  std::vector<double> cdf_;
};

/// Noise table over a vocabulary; the padding and unknown ids never appear.
inline NoiseTable build_noise_table(const text::Vocabulary& vocab,
                                    double alpha = 0.75) {
  const WordId reserved[] = {text::Vocabulary::kPad, text::Vocabulary::kUnk};
  return NoiseTable(vocab.counts(), alpha, reserved);
}

}  // namespace wordcnn::embeddings
