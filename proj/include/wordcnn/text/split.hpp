#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "wordcnn/error.hpp"
#include "wordcnn/numerics.hpp"
#include "wordcnn/text/dataset.hpp"

namespace wordcnn::text {

struct Fold {
  std::vector<std::size_t> train;  // indices into the example list
  std::vector<std::size_t> test;
};

/// Stratified k-fold partition of `labels`. Each class is shuffled by
/// `seed`, classes are laid end to end and position i goes to fold i mod k,
/// so fold sizes differ by at most one and so do per-class counts.
inline std::vector<Fold> kfold_split(const std::vector<std::size_t>& labels,
                                     std::size_t k, std::uint64_t seed) {
  require(k >= 2, ErrorKind::kInvalidInput, "kfold_split: k must be >= 2");
  require(k <= labels.size(), ErrorKind::kInvalidInput,
          "kfold_split: k exceeds number of examples");
  std::size_t classes = 0;
  for (auto l : labels) classes = std::max(classes, l + 1);
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  SeededRng rng(seed);
  std::vector<std::size_t> order;
  order.reserve(labels.size());
  for (auto& members : by_class) {
    rng.shuffle(members.begin(), members.end());
    order.insert(order.end(), members.begin(), members.end());
  }
  std::vector<std::vector<std::size_t>> fold_members(k);
  for (std::size_t i = 0; i < order.size(); ++i) fold_members[i % k].push_back(order[i]);

  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    auto& test = fold_members[f];
    std::sort(test.begin(), test.end());
    folds[f].test = test;
    for (std::size_t g = 0; g < k; ++g) {
      if (g == f) continue;
      folds[f].train.insert(folds[f].train.end(), fold_members[g].begin(),
                            fold_members[g].end());
    }
    std::sort(folds[f].train.begin(), folds[f].train.end());
  }
  return folds;
}

inline std::vector<Fold> kfold_split(const Dataset& ds, std::size_t k,
                                     std::uint64_t seed) {
  std::vector<std::size_t> labels;
  labels.reserve(ds.examples.size());
  for (const auto& ex : ds.examples) labels.push_back(ex.label);
  return kfold_split(labels, k, seed);
}

/// Drops examples uniformly at random until every class has the size of
/// the smallest class; the kept examples come back in shuffled order.
inline Dataset undersample_balance(const Dataset& ds, std::uint64_t seed) {
  const std::size_t classes = ds.class_count();
  require(classes >= 2, ErrorKind::kInvalidInput,
          "undersample_balance: need at least two classes");
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < ds.examples.size(); ++i) {
    by_class[ds.examples[i].label].push_back(i);
  }
  std::size_t smallest = ds.examples.size();
  for (std::size_t c = 0; c < classes; ++c) {
    require(!by_class[c].empty(), ErrorKind::kInvalidInput,
            "undersample_balance: class " + ds.label_names[c] + " has no examples");
    smallest = std::min(smallest, by_class[c].size());
  }
  SeededRng rng(seed);
  std::vector<std::size_t> kept;
  for (auto& members : by_class) {
    rng.shuffle(members.begin(), members.end());
    kept.insert(kept.end(), members.begin(), members.begin() + smallest);
  }
  rng.shuffle(kept.begin(), kept.end());

  Dataset out;
  out.name = ds.name;
  out.label_names = ds.label_names;
  out.vocab = ds.vocab;
  out.test = ds.test;
  out.extra_train = ds.extra_train;
  out.examples.reserve(kept.size());
  for (auto i : kept) out.examples.push_back(ds.examples[i]);
  return out;
}

}  // namespace wordcnn::text
