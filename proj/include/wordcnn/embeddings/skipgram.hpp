#pragma once

// Skip-gram with negative sampling. The loss for one (center, context) pair
// with negatives n_1..n_k is
//   -log s(out[ctx] . in[center]) - sum_i log s(-out[n_i] . in[center])
// and is minimized by plain SGD on the rows it touches.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "wordcnn/embeddings/noise_table.hpp"
#include "wordcnn/embeddings/word_vectors.hpp"
#include "wordcnn/error.hpp"
#include "wordcnn/numerics.hpp"
#include "wordcnn/text/vocabulary.hpp"

namespace wordcnn::embeddings {

struct SgnsConfig {
  int negatives = 5;
  int window = 5;
  int dim = 100;
  int epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t min_count = 5;
  double subsample = 0.0;  // 0 disables frequent-word subsampling
  double noise_exponent = 0.75;
  std::uint64_t seed = 1;
  int threads = 1;  // >1 selects asynchronous lock-free training

  void validate() const {
    require(negatives >= 1, ErrorKind::kConfig, "sgns: negatives must be >= 1");
    require(window >= 1, ErrorKind::kConfig, "sgns: window must be >= 1");
    require(dim >= 2, ErrorKind::kConfig, "sgns: dim must be >= 2");
    require(epochs >= 0, ErrorKind::kConfig, "sgns: epochs must be >= 0");
    require(learning_rate > 0.0, ErrorKind::kConfig, "sgns: learning_rate must be > 0");
    require(threads >= 1, ErrorKind::kConfig, "sgns: threads must be >= 1");
  }
};

/// Input-side ("center") and output-side ("context") embedding tables.
template <typename T>
struct SkipGramModel {
  Matrix<T> input;
  Matrix<T> output;

  SkipGramModel() = default;
  SkipGramModel(std::size_t vocab_size, std::size_t dim)
      : input(vocab_size, dim), output(vocab_size, dim) {}

  std::size_t dim() const noexcept { return input.cols(); }

  /// Input rows uniform in [-0.5/dim, 0.5/dim], output rows zero.
  void initialize(SeededRng& rng) {
    const double r = 0.5 / static_cast<double>(dim());
    fill_uniform(input.values(), rng, -r, r);
    output.fill(T{0});
  }
};

/// Every (center, context) pair with 1 <= |offset| <= window, in position
/// order then offset order (-window..window).
inline std::vector<std::pair<WordId, WordId>> generate_pairs(
    std::span<const WordId> tokens, int window) {
  std::vector<std::pair<WordId, WordId>> pairs;
  const auto n = static_cast<std::ptrdiff_t>(tokens.size());
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    for (std::ptrdiff_t j = -window; j <= window; ++j) {
      if (j == 0 || t + j < 0 || t + j >= n) continue;
      pairs.emplace_back(tokens[t], tokens[t + j]);
    }
  }
  return pairs;
}

/// Probability of keeping word `id` under frequent-word subsampling with
/// threshold `t`: min(1, sqrt(t / f)) where f is the word's relative
/// frequency.
inline double keep_probability(std::uint64_t count, std::uint64_t total, double t) {
  if (t <= 0.0 || count == 0) return 1.0;
  const double f = static_cast<double>(count) / static_cast<double>(total);
  return std::min(1.0, std::sqrt(t / f));
}

/// Drops tokens with probability 1 - keep_probability; with t == 0 the
/// sequence comes back unchanged and no randomness is consumed.
inline std::vector<WordId> subsample_tokens(std::span<const WordId> tokens,
                                            const text::Vocabulary& vocab,
                                            std::uint64_t total, double t,
                                            SeededRng& rng) {
  if (t <= 0.0) return {tokens.begin(), tokens.end()};
  std::vector<WordId> kept;
  kept.reserve(tokens.size());
  for (auto id : tokens) {
    if (rng.uniform() < keep_probability(vocab.count_of(id), total, t)) kept.push_back(id);
  }
  return kept;
}

/// Pairs after optional subsampling, as the trainer sees them.
inline std::vector<std::pair<WordId, WordId>> generate_pairs(
    std::span<const WordId> tokens, int window, const text::Vocabulary& vocab,
    double subsample, SeededRng& rng) {
  std::uint64_t total = 0;
  for (auto c : vocab.counts()) total += c;
  const auto kept = subsample_tokens(tokens, vocab, total, subsample, rng);
  return generate_pairs(kept, window);
}

template <typename T>
struct SgnsGradients {
  std::vector<T> center;                                 // d loss / d input[center]
  std::vector<std::pair<WordId, std::vector<T>>> outputs;  // per output row, summed
};

/// Loss of one pair (before any update).
template <typename T>
T sgns_loss(const SkipGramModel<T>& model, WordId center, WordId context,
            std::span<const WordId> negatives) {
  const auto in = model.input.row(center);
  const T pos = dot<T>(model.output.row(context), in);
  require(std::isfinite(pos), ErrorKind::kNumericFault, "sgns: non-finite score");
  T loss = -log_sigmoid(pos);
  for (auto n : negatives) {
    const T s = dot<T>(model.output.row(n), in);
    require(std::isfinite(s), ErrorKind::kNumericFault, "sgns: non-finite score");
    loss -= log_sigmoid(-s);
  }
  return loss;
}

/// Analytic gradient of sgns_loss with respect to every touched row.
template <typename T>
SgnsGradients<T> sgns_gradients(const SkipGramModel<T>& model, WordId center,
                                WordId context, std::span<const WordId> negatives) {
  const std::size_t k = model.dim();
  const auto in = model.input.row(center);
  SgnsGradients<T> g;
  g.center.assign(k, T{0});
  auto add_output = [&](WordId id, T coeff) {
    auto it = std::find_if(g.outputs.begin(), g.outputs.end(),
                           [&](const auto& p) { return p.first == id; });
    if (it == g.outputs.end()) {
      g.outputs.emplace_back(id, std::vector<T>(k, T{0}));
      it = std::prev(g.outputs.end());
    }
    const auto out = model.output.row(id);
    for (std::size_t i = 0; i < k; ++i) {
      it->second[i] += coeff * in[i];
      g.center[i] += coeff * out[i];
    }
  };
  add_output(context, sigmoid(dot<T>(model.output.row(context), in)) - T{1});
  for (auto n : negatives) add_output(n, sigmoid(dot<T>(model.output.row(n), in)));
  return g;
}

/// One SGD step on a pair; returns the loss before the update. Only the
/// center's input row and the context/negative output rows change.
template <typename T>
T sgns_step(SkipGramModel<T>& model, WordId center, WordId context,
            std::span<const WordId> negatives, T lr) {
  const std::size_t k = model.dim();
  auto in = model.input.row(center);
  std::vector<T> center_grad(k, T{0});

  const T pos = dot<T>(model.output.row(context), std::span<const T>(in));
  require(std::isfinite(pos), ErrorKind::kNumericFault, "sgns: non-finite score");
  T loss = -log_sigmoid(pos);
  std::vector<T> scores(negatives.size());
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    scores[j] = dot<T>(model.output.row(negatives[j]), std::span<const T>(in));
    require(std::isfinite(scores[j]), ErrorKind::kNumericFault, "sgns: non-finite score");
    loss -= log_sigmoid(-scores[j]);
  }

  // Gradients are taken at the pre-update point, so a repeated negative
  // moves its row by the summed gradient.
  std::vector<std::pair<WordId, T>> coeffs;
  coeffs.reserve(negatives.size() + 1);
  coeffs.emplace_back(context, sigmoid(pos) - T{1});
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    coeffs.emplace_back(negatives[j], sigmoid(scores[j]));
  }
  for (const auto& [id, coeff] : coeffs) {
    const auto out = model.output.row(id);
    for (std::size_t i = 0; i < k; ++i) center_grad[i] += coeff * out[i];
  }
  for (const auto& [id, coeff] : coeffs) {
    auto out = model.output.row(id);
    for (std::size_t i = 0; i < k; ++i) out[i] -= lr * coeff * in[i];
  }
  for (std::size_t i = 0; i < k; ++i) in[i] -= lr * center_grad[i];
  return loss;
}

/// Draws `count` negatives from `noise`, redrawing any equal to `context`.
inline void draw_negatives(const NoiseTable& noise, WordId context, SeededRng& rng,
                           std::vector<WordId>& out, int count) {
  out.clear();
  while (static_cast<int>(out.size()) < count) {
    const WordId w = noise.sample(rng);
    if (w != context) out.push_back(w);
  }
}

inline constexpr std::size_t kSgnsChunk = 10000;

struct SgnsResult {
  WordVectors vectors;
  text::Vocabulary vocab;
  std::vector<double> epoch_loss;  // mean pair loss per epoch
};

namespace detail {

// Relaxed atomic row access for the asynchronous trainer: updates from
// different workers may overwrite each other, but never tear a value.
template <typename T>
T sgns_step_racy(SkipGramModel<T>& model, WordId center, WordId context,
                 std::span<const WordId> negatives, T lr, std::vector<T>& in_copy,
                 std::vector<T>& grad) {
  const std::size_t k = model.dim();
  T* in_row = model.input.row(center).data();
  for (std::size_t i = 0; i < k; ++i) {
    in_copy[i] = std::atomic_ref<T>(in_row[i]).load(std::memory_order_relaxed);
  }
  std::fill(grad.begin(), grad.end(), T{0});
  T loss = 0;
  auto visit = [&](WordId id, bool positive) {
    T* out = model.output.row(id).data();
    T s = 0;
    for (std::size_t i = 0; i < k; ++i) {
      s += std::atomic_ref<T>(out[i]).load(std::memory_order_relaxed) * in_copy[i];
    }
    if (!std::isfinite(s)) fail(ErrorKind::kNumericFault, "sgns: non-finite score");
    loss -= positive ? log_sigmoid(s) : log_sigmoid(-s);
    const T coeff = positive ? sigmoid(s) - T{1} : sigmoid(s);
    for (std::size_t i = 0; i < k; ++i) {
      std::atomic_ref<T> ref(out[i]);
      const T o = ref.load(std::memory_order_relaxed);
      grad[i] += coeff * o;
      ref.store(o - lr * coeff * in_copy[i], std::memory_order_relaxed);
    }
  };
  visit(context, true);
  for (auto n : negatives) visit(n, false);
  for (std::size_t i = 0; i < k; ++i) {
    std::atomic_ref<T> ref(in_row[i]);
    ref.store(ref.load(std::memory_order_relaxed) - lr * grad[i],
              std::memory_order_relaxed);
  }
  return loss;
}

}  // namespace detail

/// Trains skip-gram vectors on tokenized sentences. Words below
/// `min_count` are removed before windows are formed. With one thread the
/// result is a pure function of (corpus, config); with more, workers update
/// shared rows without locks and the result is nondeterministic.
template <typename T = float>
SgnsResult train_sgns(const std::vector<std::vector<std::string>>& sentences,
                      const SgnsConfig& config) {
  config.validate();
  SgnsResult result;
  result.vocab = text::build_vocab(sentences, config.min_count);

  std::vector<std::vector<WordId>> corpus;
  std::uint64_t token_total = 0;
  for (const auto& s : sentences) {
    std::vector<WordId> ids;
    for (const auto& tok : s) {
      auto id = result.vocab.find(tok);
      if (id && *id >= text::Vocabulary::kReserved) ids.push_back(*id);
    }
    token_total += ids.size();
    // Long lines (text8 is a single line) are cut into fixed chunks.
    for (std::size_t b = 0; b < ids.size(); b += kSgnsChunk) {
      const std::size_t e = std::min(ids.size(), b + kSgnsChunk);
      corpus.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(b),
                          ids.begin() + static_cast<std::ptrdiff_t>(e));
    }
  }
  require(token_total > 0 && result.vocab.word_count() >= 2, ErrorKind::kInvalidInput,
          "train_sgns: corpus is empty after min_count filtering");

  const NoiseTable noise = build_noise_table(result.vocab, config.noise_exponent);
  SeededRng init_rng(config.seed);
  SkipGramModel<T> model(result.vocab.size(), static_cast<std::size_t>(config.dim));
  model.initialize(init_rng);
  // Reserved rows never receive updates; keep them at zero in the export.
  for (std::size_t r = 0; r < text::Vocabulary::kReserved; ++r) {
    std::fill(model.input.row(r).begin(), model.input.row(r).end(), T{0});
  }

  const double total_work =
      static_cast<double>(token_total) * static_cast<double>(config.epochs);
  auto rate_at = [&](double done) {
    const double frac = total_work > 0 ? done / total_work : 0.0;
    return config.learning_rate * std::max(1e-4, 1.0 - frac);
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double epoch_start = static_cast<double>(token_total) * epoch;
    if (config.threads == 1) {
      SeededRng rng(SeededRng(config.seed).derive(static_cast<std::uint64_t>(epoch) + 1));
      std::vector<WordId> negs;
      double loss_sum = 0.0;
      std::uint64_t pairs = 0, done = 0;
      for (const auto& sentence : corpus) {
        const auto kept = subsample_tokens(sentence, result.vocab, token_total,
                                           config.subsample, rng);
        const auto n = static_cast<std::ptrdiff_t>(kept.size());
        for (std::ptrdiff_t t = 0; t < n; ++t) {
          const T lr = static_cast<T>(rate_at(epoch_start + static_cast<double>(done)));
          for (std::ptrdiff_t j = -config.window; j <= config.window; ++j) {
            if (j == 0 || t + j < 0 || t + j >= n) continue;
            draw_negatives(noise, kept[t + j], rng, negs, config.negatives);
            loss_sum += sgns_step<T>(model, kept[t], kept[t + j], negs, lr);
            ++pairs;
          }
          ++done;
        }
        done += sentence.size() - kept.size();
      }
      result.epoch_loss.push_back(pairs ? loss_sum / static_cast<double>(pairs) : 0.0);
    } else {
      // Asynchronous workers over contiguous slices of the corpus.
      const auto workers = static_cast<std::size_t>(config.threads);
      std::vector<double> loss_sums(workers, 0.0);
      std::vector<std::uint64_t> pair_counts(workers, 0);
      std::atomic<std::uint64_t> progress{0};
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          SeededRng rng(SeededRng(config.seed)
                            .derive((static_cast<std::uint64_t>(epoch) + 1) * 1000 + w));
          std::vector<WordId> negs;
          std::vector<T> in_copy(model.dim()), grad(model.dim());
          for (std::size_t s = w; s < corpus.size(); s += workers) {
            const auto kept = subsample_tokens(corpus[s], result.vocab, token_total,
                                               config.subsample, rng);
            const auto n = static_cast<std::ptrdiff_t>(kept.size());
            for (std::ptrdiff_t t = 0; t < n; ++t) {
              const T lr = static_cast<T>(rate_at(
                  epoch_start + static_cast<double>(progress.load(std::memory_order_relaxed))));
              for (std::ptrdiff_t j = -config.window; j <= config.window; ++j) {
                if (j == 0 || t + j < 0 || t + j >= n) continue;
                draw_negatives(noise, kept[t + j], rng, negs, config.negatives);
                loss_sums[w] += detail::sgns_step_racy<T>(model, kept[t], kept[t + j],
                                                          negs, lr, in_copy, grad);
                ++pair_counts[w];
              }
              progress.fetch_add(1, std::memory_order_relaxed);
            }
          }
        });
      }
      pool.clear();
      double loss_sum = 0.0;
      std::uint64_t pairs = 0;
      for (std::size_t w = 0; w < workers; ++w) {
        loss_sum += loss_sums[w];
        pairs += pair_counts[w];
      }
      result.epoch_loss.push_back(pairs ? loss_sum / static_cast<double>(pairs) : 0.0);
    }
  }

  std::vector<std::string> words;
  Matrix<float> exported(result.vocab.word_count(), model.dim());
  for (std::size_t id = text::Vocabulary::kReserved; id < result.vocab.size(); ++id) {
    words.push_back(result.vocab.token_of(static_cast<WordId>(id)));
    const auto src = model.input.row(id);
    auto dst = exported.row(id - text::Vocabulary::kReserved);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<float>(src[i]);
  }
  result.vectors = WordVectors(std::move(words), std::move(exported));
  return result;
}

}  // namespace wordcnn::embeddings
