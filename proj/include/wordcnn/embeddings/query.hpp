#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "wordcnn/embeddings/word_vectors.hpp"
#include "wordcnn/error.hpp"

namespace wordcnn::embeddings {

template <typename T>
double cosine_similarity(std::span<const T> u, std::span<const T> v) {
  require(u.size() == v.size(), ErrorKind::kInvalidInput,
          "cosine_similarity: dimension mismatch");
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = static_cast<double>(u[i]);
    const double b = static_cast<double>(v[i]);
    uv += a * b;
    uu += a * a;
    vv += b * b;
  }
  require(uu > 0.0 && vv > 0.0, ErrorKind::kInvalidInput,
          "cosine_similarity: zero vector");
  return std::clamp(uv / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

template <typename T>
double cosine_similarity(const std::vector<T>& u, const std::vector<T>& v) {
  return cosine_similarity(std::span<const T>(u), std::span<const T>(v));
}

struct Neighbor {
  std::string word;
  std::size_t index = 0;
  double similarity = 0.0;
};

/// Ranks every row except `exclude` by cosine similarity to `target`:
/// descending similarity, ascending row index on ties. Zero rows are
/// skipped.
inline std::vector<Neighbor> rank_by_cosine(const WordVectors& vectors,
                                            std::span<const double> target,
                                            std::size_t top_n,
                                            const std::unordered_set<std::size_t>& exclude) {
  double tt = 0.0;
  for (double x : target) tt += x * x;
  require(tt > 0.0, ErrorKind::kInvalidInput, "query vector is zero");
  const double target_norm = std::sqrt(tt);

  std::vector<Neighbor> all;
  all.reserve(vectors.size());
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    if (exclude.count(r)) continue;
    const auto row = vectors.vector(r);
    double dotp = 0.0, rr = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      dotp += row[i] * target[i];
      rr += static_cast<double>(row[i]) * row[i];
    }
    if (rr == 0.0) continue;
    all.push_back({{}, r, std::clamp(dotp / (std::sqrt(rr) * target_norm), -1.0, 1.0)});
  }
  auto better = [](const Neighbor& a, const Neighbor& b) {
    return a.similarity != b.similarity ? a.similarity > b.similarity
                                        : a.index < b.index;
  };
  const std::size_t keep = std::min(top_n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep),
                    all.end(), better);
  all.resize(keep);
  for (auto& n : all) n.word = vectors.word(n.index);
  return all;
}

/// Closest words to `word`; the query word itself is never returned.
inline std::vector<Neighbor> nearest_neighbors(
    const std::string& word, const WordVectors& vectors, std::size_t top_n,
    std::unordered_set<std::size_t> exclude = {}) {
  const std::size_t q = vectors.require_index(word);
  exclude.insert(q);
  const auto row = vectors.vector(q);
  std::vector<double> target(row.begin(), row.end());
  return rank_by_cosine(vectors, target, top_n, exclude);
}

/// "a is to b as c is to ?": ranks words other than a, b, c by cosine to
/// unit(b) - unit(a) + unit(c).
inline std::vector<Neighbor> analogy(const std::string& a, const std::string& b,
                                     const std::string& c,
                                     const WordVectors& vectors,
                                     std::size_t top_n) {
  const std::size_t ia = vectors.require_index(a);
  const std::size_t ib = vectors.require_index(b);
  const std::size_t ic = vectors.require_index(c);
  auto unit = [&](std::size_t i) {
    const auto row = vectors.vector(i);
    std::vector<double> v(row.begin(), row.end());
    double sq = 0.0;
    for (double x : v) sq += x * x;
    require(sq > 0.0, ErrorKind::kInvalidInput,
            "analogy: zero vector for " + vectors.word(i));
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& x : v) x *= inv;
    return v;
  };
  const auto ua = unit(ia), ub = unit(ib), uc = unit(ic);
  std::vector<double> target(vectors.dim());
  for (std::size_t i = 0; i < target.size(); ++i) target[i] = ub[i] - ua[i] + uc[i];
  return rank_by_cosine(vectors, target, top_n, {ia, ib, ic});
}

}  // namespace wordcnn::embeddings
