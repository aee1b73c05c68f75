#pragma once

// Unigram TF-IDF features. tf is the raw count, idf the smoothed
// ln((1 + N) / (1 + df)) + 1, and every non-empty document vector has unit
// L2 norm. Terms unseen at fit time are dropped at transform time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wordcnn/error.hpp"

namespace wordcnn::baselines {

/// (feature index, value) pairs sorted by index, indices unique.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

class TfidfModel {
 public:
  std::size_t dim() const noexcept { return terms_.size(); }
  std::size_t documents() const noexcept { return documents_; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::size_t>& document_frequency() const noexcept { return df_; }
  const std::vector<double>& idf() const noexcept { return idf_; }

  std::optional<std::uint32_t> find(const std::string& term) const {
    const auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Terms are indexed in byte order so the model does not depend on the
  /// order documents arrive in.
  void fit(const std::vector<std::vector<std::string>>& docs) {
    require(!docs.empty(), ErrorKind::kInvalidInput, "tfidf: empty corpus");
    std::map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
      std::vector<std::string> seen(doc.begin(), doc.end());
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (auto& t : seen) ++df[std::move(t)];
    }
    terms_.clear();
    df_.clear();
    idf_.clear();
    index_.clear();
    documents_ = docs.size();
    const double n = static_cast<double>(documents_);
    for (const auto& [term, count] : df) {
      index_.emplace(term, static_cast<std::uint32_t>(terms_.size()));
      terms_.push_back(term);
      df_.push_back(count);
      idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
  }

  /// An empty (or fully out-of-vocabulary) document maps to the zero vector.
  SparseVector transform(const std::vector<std::string>& doc) const {
    std::map<std::uint32_t, double> tf;
    for (const auto& t : doc) {
      if (auto id = find(t)) tf[*id] += 1.0;
    }
    SparseVector out;
    out.reserve(tf.size());
    double norm = 0.0;
    for (const auto& [id, count] : tf) {
      const double v = count * idf_[id];
      out.emplace_back(id, v);
      norm += v * v;
    }
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (auto& e : out) e.second /= norm;
    }
    return out;
  }

  std::vector<SparseVector> transform_all(const std::vector<std::vector<std::string>>& docs) const {
    std::vector<SparseVector> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(transform(d));
    return out;
  }

  friend bool operator==(const TfidfModel& a, const TfidfModel& b) {
    return a.terms_ == b.terms_ && a.df_ == b.df_ && a.idf_ == b.idf_ &&
           a.documents_ == b.documents_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t documents_ = 0;
};

inline std::pair<TfidfModel, std::vector<SparseVector>> tfidf_fit_transform(
    const std::vector<std::vector<std::string>>& docs) {
  TfidfModel model;
  model.fit(docs);
  auto features = model.transform_all(docs);
  return {std::move(model), std::move(features)};
}

inline double norm(const SparseVector& v) {
  double s = 0.0;
  for (const auto& e : v) s += e.second * e.second;
  return std::sqrt(s);
}

}  // namespace wordcnn::baselines
