#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "wordcnn/classifier/config.hpp"
#include "wordcnn/classifier/model.hpp"
#include "wordcnn/classifier/network.hpp"
#include "wordcnn/embeddings/word_vectors.hpp"
#include "wordcnn/error.hpp"
#include "wordcnn/numerics.hpp"
#include "wordcnn/text/dataset.hpp"
#include "wordcnn/text/split.hpp"

namespace wordcnn::classifier {

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;  // mean cross-entropy, no l2 term
  std::size_t correct = 0;
  std::size_t total = 0;
  std::vector<std::vector<std::size_t>> confusion;  // [gold][predicted]
};

/// Accuracy and confusion counts of argmax predictions (no dropout).
template <typename T>
Evaluation evaluate(const CnnModel<T>& model, const std::vector<const text::Example*>& examples,
                    std::size_t max_length, std::size_t batch_size = 200) {
  require(!examples.empty(), ErrorKind::kInvalidInput, "evaluate: empty evaluation set");
  const std::size_t C = model.class_count();
  Evaluation ev;
  ev.confusion.assign(C, std::vector<std::size_t>(C, 0));
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < examples.size(); start += batch_size) {
    const std::size_t end = std::min(examples.size(), start + batch_size);
    const auto batch = encode_batch(
        std::span<const text::Example* const>(examples.data() + start, end - start),
        max_length, model.max_width());
    const auto cache = forward(model, batch);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto row = cache.logits.row(b);
      const std::size_t pred = argmax_row<T>(row);
      const std::size_t gold = batch.labels[b];
      require(gold < C, ErrorKind::kInvalidInput, "evaluate: label out of range");
      ++ev.confusion[gold][pred];
      ev.correct += pred == gold;
      loss_sum += static_cast<double>(softmax_cross_entropy<T>(row, gold).loss);
    }
  }
  ev.total = examples.size();
  ev.accuracy = static_cast<double>(ev.correct) / static_cast<double>(ev.total);
  ev.loss = loss_sum / static_cast<double>(ev.total);
  return ev;
}

struct EpochMetrics {
  int epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;      // mean batch objective over the epoch
  double train_accuracy = 0.0;  // of the dropout-perturbed training predictions
  std::optional<Evaluation> test;
};

/// What the trainer needs from a dataset: the examples to fit and score,
/// the vocabulary they index, the class count and the padded length n.
struct TrainingData {
  const text::Vocabulary* vocab = nullptr;
  std::size_t classes = 0;
  std::size_t max_length = 0;
  std::vector<const text::Example*> train;
  std::vector<const text::Example*> test;
};

template <typename T>
struct TrainResult {
  CnnModel<T> model;
  std::vector<EpochMetrics> history;
  std::size_t random_embedding_rows = 0;
  std::size_t truncated_test_sentences = 0;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

template <typename T>
void apply_adam(CnnModel<T>& model, const CnnGradients<T>& grads,
                std::vector<AdamState<T>>& states, double lr, bool train_embeddings) {
  std::size_t slot = 0;
  auto step = [&](Matrix<T>& param, const Matrix<T>& grad) {
    if (states.size() <= slot) states.emplace_back(param);
    adam_step(param, grad, states[slot++], lr);
  };
  if (train_embeddings) step(model.embeddings, grads.embeddings);
  for (std::size_t i = 0; i < model.banks.size(); ++i) {
    step(model.banks[i].weights, grads.bank_weights[i]);
    step(model.banks[i].bias, grads.bank_bias[i]);
  }
  step(model.final_weights, grads.final_weights);
  step(model.final_bias, grads.final_bias);
}

/// Fits a fresh model: shuffled mini-batches (the last short batch is
/// kept), dropout on the pooled features, Adam with the epoch schedule.
/// Deterministic for a given (data, config, pretrained).
template <typename T = float>
TrainResult<T> train(const TrainingData& data, const CnnConfig& config,
                     const embeddings::WordVectors* pretrained = nullptr,
                     const EpochCallback& on_epoch = {}) {
  config.validate();
  require(data.vocab != nullptr, ErrorKind::kInvalidInput, "train: no vocabulary");
  require(!data.train.empty(), ErrorKind::kInvalidInput, "train: no training examples");
  require(data.max_length > 0, ErrorKind::kInvalidInput, "train: max_length is zero");

  SeededRng rng(config.seed);
  SeededRng init_rng(rng.derive(1));
  auto table = init_embeddings<T>(*data.vocab, config.variant, pretrained,
                                  config.embedding_dim, config.unknown_range, init_rng);
  TrainResult<T> result;
  result.random_embedding_rows = table.random_rows;
  result.model = init_model<T>(std::move(table.embeddings), config, data.classes, init_rng);
  auto& model = result.model;

  for (const auto* ex : data.test) {
    if (ex->tokens.size() > data.max_length) ++result.truncated_test_sentences;
  }

  const bool train_embeddings = config.variant != Variant::kStatic;
  SeededRng order_rng(rng.derive(2));
  SeededRng dropout_rng(rng.derive(3));
  std::vector<AdamState<T>> states;
  std::vector<std::size_t> order(data.train.size());
  const std::size_t width = config.max_width();

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const double lr = config.schedule.rate(epoch);
    std::iota(order.begin(), order.end(), std::size_t{0});
    order_rng.shuffle(order.begin(), order.end());

    double objective_sum = 0.0;
    std::size_t correct = 0;
    std::vector<const text::Example*> members;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      members.clear();
      for (std::size_t i = start; i < end; ++i) members.push_back(data.train[order[i]]);
      const auto batch = encode_batch(members, data.max_length, width);
      const auto masks = draw_dropout_masks<T>(batch.size(), config.penultimate_dim(),
                                               config.dropout, dropout_rng);
      const auto cache = forward(model, batch, &masks);
      const T objective = loss(cache.logits, batch.labels, model, config.l2);
      if (!std::isfinite(objective)) {
        fail(ErrorKind::kNumericFault, "train: non-finite loss in epoch " + std::to_string(epoch));
      }
      objective_sum += static_cast<double>(objective) * static_cast<double>(batch.size());
      for (std::size_t b = 0; b < batch.size(); ++b) {
        correct += argmax_row<T>(cache.logits.row(b)) == batch.labels[b];
      }
      const auto grads = backward(model, cache, batch, config.l2, train_embeddings);
      apply_adam(model, grads, states, lr, train_embeddings);
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.learning_rate = lr;
    m.train_loss = objective_sum / static_cast<double>(order.size());
    m.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    if (!data.test.empty()) m.test = evaluate(model, data.test, data.max_length);
    if (on_epoch) on_epoch(m);
    result.history.push_back(std::move(m));
  }
  return result;
}

/// Pointers to examples selected by index, plus any training-only extras.
inline std::vector<const text::Example*> select(const std::vector<text::Example>& pool,
                                                const std::vector<std::size_t>& indices) {
  std::vector<const text::Example*> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(&pool[i]);
  return out;
}

inline std::vector<const text::Example*> all_of(const std::vector<text::Example>& pool) {
  std::vector<const text::Example*> out;
  out.reserve(pool.size());
  for (const auto& ex : pool) out.push_back(&ex);
  return out;
}

/// Training data for a benchmark with a fixed test split.
inline TrainingData fixed_split_data(const text::Dataset& ds) {
  TrainingData data;
  data.vocab = &ds.vocab;
  data.classes = ds.class_count();
  data.max_length = ds.max_length();
  data.train = all_of(ds.examples);
  for (const auto& ex : ds.extra_train) data.train.push_back(&ex);
  data.test = all_of(ds.test);
  return data;
}

struct CvResult {
  std::vector<double> fold_accuracy;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  std::vector<std::vector<EpochMetrics>> fold_history;
};

inline void summarize(CvResult& r) {
  const auto k = static_cast<double>(r.fold_accuracy.size());
  r.mean = std::accumulate(r.fold_accuracy.begin(), r.fold_accuracy.end(), 0.0) / k;
  double ss = 0.0;
  for (double a : r.fold_accuracy) ss += (a - r.mean) * (a - r.mean);
  r.stddev = k > 1 ? std::sqrt(ss / (k - 1)) : 0.0;
}

/// k-fold cross-validation: one independently seeded model per fold, each
/// trained on the other k-1 folds (plus training-only extras) and scored
/// on its own fold.
template <typename T = float>
CvResult run_cv(const text::Dataset& ds, const CnnConfig& config, std::size_t k,
                std::uint64_t seed, const embeddings::WordVectors* pretrained = nullptr,
                const std::function<void(std::size_t, const EpochMetrics&)>& on_epoch = {}) {
  const auto folds = text::kfold_split(ds, k, seed);
  const SeededRng master(seed);
  CvResult result;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    TrainingData data;
    data.vocab = &ds.vocab;
    data.classes = ds.class_count();
    data.max_length = ds.max_length();
    data.train = select(ds.examples, folds[f].train);
    for (const auto& ex : ds.extra_train) data.train.push_back(&ex);
    data.test = select(ds.examples, folds[f].test);
    CnnConfig fold_config = config;
    fold_config.seed = master.derive(100 + f);
    const auto trained = train<T>(
        data, fold_config, pretrained,
        on_epoch ? EpochCallback([&](const EpochMetrics& m) { on_epoch(f, m); })
                 : EpochCallback{});
    const auto ev = evaluate(trained.model, data.test, data.max_length);
    result.fold_accuracy.push_back(ev.accuracy);
    result.fold_history.push_back(trained.history);
  }
  summarize(result);
  return result;
}

}  // namespace wordcnn::classifier
