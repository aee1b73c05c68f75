#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "wordcnn/classifier/checkpoint.hpp"
#include "wordcnn/classifier/config.hpp"
#include "wordcnn/classifier/model.hpp"
#include "wordcnn/classifier/network.hpp"
#include "wordcnn/classifier/trainer.hpp"

using namespace wordcnn;
using namespace wordcnn::classifier;
using wordcnn::testing::ScratchDir;
using wordcnn::testing::cue_word_corpus;
using wordcnn::testing::random_examples;
using wordcnn::testing::random_model;
using text::Example;

namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected wordcnn::Error";
  return ErrorKind::kInternal;
}

std::vector<const Example*> ptrs(const std::vector<Example>& xs) {
  return wordcnn::testing::pointers(xs);
}

text::Dataset cue_dataset(std::size_t per_class, std::uint64_t seed, std::size_t classes = 2) {
  return text::assemble_dataset("toy", cue_word_corpus(per_class, seed, classes));
}

CnnConfig small_config() {
  CnnConfig c;
  c.feature_maps = 8;
  c.embedding_dim = 16;
  c.batch_size = 10;
  c.epochs = 25;
  return c;
}

}  // namespace

// ----------------------------------------------------------------- config

TEST(CnnConfig, DefaultsAndValidation) {
  CnnConfig c;
  EXPECT_EQ(c.penultimate_dim(), 300u);
  EXPECT_EQ(c.max_width(), 5u);
  EXPECT_NO_THROW(c.validate());
  c.filter_widths = {4, 3};
  EXPECT_EQ(kind_of([&] { c.validate(); }), ErrorKind::kConfig);
  c = {};
  c.dropout = 1.0;
  EXPECT_EQ(kind_of([&] { c.validate(); }), ErrorKind::kConfig);
  c = {};
  c.l2 = -1;
  EXPECT_EQ(kind_of([&] { c.validate(); }), ErrorKind::kConfig);
  EXPECT_EQ(kind_of([] { parse_variant("multichannel"); }), ErrorKind::kConfig);
  EXPECT_EQ(parse_variant("non-static"), Variant::kNonStatic);
}

TEST(CnnConfig, EpochTable) {
  EXPECT_EQ(default_epochs("MR", Variant::kRand), 4);
  EXPECT_EQ(default_epochs("SST-1", Variant::kRand), 4);
  EXPECT_EQ(default_epochs("Tweet", Variant::kRand), 10);
  EXPECT_EQ(default_epochs("TREC", Variant::kRand), 25);
  for (const char* d : {"MR", "TREC", "Tweet", "Polite"}) {
    EXPECT_EQ(default_epochs(d, Variant::kStatic), 25);
  }
  for (const char* d : {"MR", "SST-1", "SST-2", "Subj"}) {
    EXPECT_EQ(default_epochs(d, Variant::kNonStatic), 4);
  }
  EXPECT_EQ(default_epochs("Polite", Variant::kNonStatic), 10);
  EXPECT_EQ(default_epochs("Tweet", Variant::kNonStatic), 16);
  EXPECT_EQ(default_epochs("Opi", Variant::kNonStatic), 16);
  EXPECT_EQ(default_epochs("TREC", Variant::kNonStatic), 25);
  EXPECT_EQ(default_epochs("Irony", Variant::kNonStatic), 25);
}

// ------------------------------------------------------------- embeddings

TEST(InitEmbeddings, RandRowsInRangeAndPaddingZero) {
  const auto ds = cue_dataset(20, 1);
  SeededRng rng(3);
  const auto init = init_embeddings<float>(ds.vocab, Variant::kRand, nullptr, 30, 0.5, rng);
  ASSERT_EQ(init.embeddings.rows(), ds.vocab.size());
  for (std::size_t r = 0; r < init.embeddings.rows(); ++r) {
    for (float x : init.embeddings.row(r)) {
      if (r == Vocabulary::kPad) {
        EXPECT_EQ(x, 0.0f);
      } else {
        EXPECT_GE(x, -0.5f);
        EXPECT_LE(x, 0.5f);
      }
    }
  }
  EXPECT_EQ(init.random_rows, ds.vocab.word_count());
}

TEST(InitEmbeddings, PretrainedRowsCopiedBitwise) {
  const auto ds = cue_dataset(20, 1);
  Matrix<float> pv(2, 4);
  SeededRng vr(4);
  fill_uniform(pv.values(), vr, -3, 3);
  const embeddings::WordVectors pre({"film", "not-in-data"}, pv);
  for (auto variant : {Variant::kStatic, Variant::kNonStatic}) {
    SeededRng rng(5);
    const auto init = init_embeddings<float>(ds.vocab, variant, &pre, 4, 0.5, rng);
    const auto row = init.embeddings.row(ds.vocab.id_of("film"));
    EXPECT_TRUE(std::equal(row.begin(), row.end(), pv.row(0).begin()));
    EXPECT_EQ(init.random_rows, ds.vocab.word_count() - 1);
  }
}

TEST(InitEmbeddings, PretrainedVariantsNeedVectors) {
  const auto ds = cue_dataset(5, 1);
  SeededRng rng(5);
  EXPECT_EQ(kind_of([&] { init_embeddings<float>(ds.vocab, Variant::kStatic, nullptr, 4, 0.5, rng); }),
            ErrorKind::kConfig);
  const embeddings::WordVectors pre({"film"}, Matrix<float>(1, 3));
  EXPECT_EQ(kind_of([&] { init_embeddings<float>(ds.vocab, Variant::kNonStatic, &pre, 4, 0.5, rng); }),
            ErrorKind::kConfig);
}

TEST(InitModel, ShapesAndZeroFinalLayer) {
  SeededRng rng(6);
  const auto m = init_model<float>(Matrix<float>(10, 300, 1.0f), CnnConfig{}, 2, rng);
  EXPECT_EQ(m.penultimate_dim(), 300u);
  EXPECT_EQ(m.banks.size(), 3u);
  EXPECT_EQ(m.banks[2].weights.cols(), 5u * 300);
  for (float x : m.final_weights.values()) EXPECT_EQ(x, 0.0f);
  for (float x : m.embeddings.row(Vocabulary::kPad)) EXPECT_EQ(x, 0.0f);
  EXPECT_EQ(kind_of([&] { init_model<float>(Matrix<float>(10, 3), CnnConfig{}, 1, rng); }),
            ErrorKind::kInvalidInput);
}

// -------------------------------------------------------------- encoding

TEST(EncodeBatch, PaddingArithmetic) {
  const std::vector<Example> xs = {{{2, 3, 4}, 0, ""}, {{5, 6, 7, 8, 9}, 1, ""}};
  const auto b = encode_batch(ptrs(xs), 5, 5);
  ASSERT_EQ(b.row_length(), 9u);
  const std::vector<text::WordId> r0(b.row(0).begin(), b.row(0).end());
  EXPECT_EQ(r0, (std::vector<text::WordId>{0, 0, 0, 0, 2, 3, 4, 0, 0}));
  const std::vector<text::WordId> r1(b.row(1).begin(), b.row(1).end());
  EXPECT_EQ(r1, (std::vector<text::WordId>{0, 0, 0, 0, 5, 6, 7, 8, 9}));
  EXPECT_EQ(b.labels, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(b.truncated, 0u);
  EXPECT_EQ(encode_batch(ptrs(xs), 59, 5).row_length(), 63u);
}

TEST(EncodeBatch, TruncatesLongSentences) {
  const std::vector<Example> xs = {{{2, 3, 4, 5}, 0, ""}};
  const auto b = encode_batch(ptrs(xs), 2, 3);
  EXPECT_EQ(b.truncated, 1u);
  EXPECT_EQ(b.lengths[0], 2u);
  const std::vector<text::WordId> r(b.row(0).begin(), b.row(0).end());
  EXPECT_EQ(r, (std::vector<text::WordId>{0, 0, 2, 3}));
}

TEST(EncodeBatch, EmptyExampleInvalid) {
  const std::vector<Example> xs = {{{}, 0, ""}};
  EXPECT_EQ(kind_of([&] { encode_batch(ptrs(xs), 3, 3); }), ErrorKind::kInvalidInput);
}

TEST(DropoutMasks, EntriesAreZeroOrInverseKeep) {
  SeededRng rng(7);
  const auto m = draw_dropout_masks<double>(20, 30, 0.5, rng);
  for (double x : m.values()) EXPECT_TRUE(x == 0.0 || x == 2.0);
  const auto ones = draw_dropout_masks<double>(3, 3, 0.0, rng);
  for (double x : ones.values()) EXPECT_EQ(x, 1.0);
}

// --------------------------------------------------------------- forward

TEST(Forward, HandConvolutionToy) {
  CnnModel<double> m;
  m.embeddings = Matrix<double>(5, 1);
  m.embeddings(2, 0) = 1;
  m.embeddings(3, 0) = -2;
  m.embeddings(4, 0) = 3;
  FilterBank<double> bank;
  bank.width = 2;
  bank.weights = Matrix<double>(1, 2, 1.0);
  bank.bias = Matrix<double>(1, 1);
  m.banks.push_back(bank);
  m.final_weights = Matrix<double>(2, 1);
  m.final_weights(0, 0) = 1.0;
  m.final_bias = Matrix<double>(1, 2);
  const std::vector<Example> xs = {{{2, 3, 4}, 0, ""}};
  const auto b = encode_batch(ptrs(xs), 3, 2);
  const auto cache = forward(m, b);
  EXPECT_EQ(cache.penultimate(0, 0), 1.0);
  EXPECT_EQ(cache.logits(0, 0), 1.0);
  EXPECT_EQ(cache.logits(0, 1), 0.0);
}

TEST(Forward, ZeroEmbeddingsGiveFinalBias) {
  SeededRng rng(8);
  auto m = random_model<double>(6, 3, {2, 3}, 4, 3, rng);
  for (auto& x : m.embeddings.values()) x = 0;
  for (auto& bank : m.banks) bank.bias = Matrix<double>(1, 4);
  const auto xs = random_examples(3, 5, 6, 3, rng);
  const auto cache = forward(m, encode_batch(ptrs(xs), 5, 3));
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(cache.logits(b, c), m.final_bias[c]);
  }
}

TEST(Forward, NarrowPaddingIsConfigError) {
  SeededRng rng(9);
  const auto m = random_model<double>(6, 3, {2, 4}, 2, 2, rng);
  const auto xs = random_examples(1, 3, 6, 2, rng);
  EXPECT_EQ(kind_of([&] { forward(m, encode_batch(ptrs(xs), 3, 2)); }), ErrorKind::kConfig);
}

TEST(Forward, MatchesNaiveConvolutionOn100Shapes) {
  EXPECT_LT(wordcnn::testing::convolution_oracle_error(100, 10), 1e-12);
}

TEST(Forward, ExtraRightPaddingLeavesLogitsUnchanged) {
  SeededRng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = random_model<double>(8, 3, {2, 3, 4}, 3, 2, rng);
    // With n - len >= l_h every width already has an all-pad window, so
    // extra padding only repeats values (the bias) already in the pool.
    const auto xs = random_examples(4, 4, 8, 2, rng);
    const auto a = forward(m, encode_batch(ptrs(xs), 8, 4));
    const auto b = forward(m, encode_batch(ptrs(xs), 20, 4));
    for (std::size_t i = 0; i < a.logits.size(); ++i) EXPECT_EQ(a.logits[i], b.logits[i]);
  }
}

// ------------------------------------------------------------------ loss

TEST(Loss, UniformLogitsTwoClasses) {
  const Matrix<double> logits(3, 2, 0.7);
  SeededRng rng(12);
  auto m = random_model<double>(4, 2, {1}, 1, 2, rng);
  const std::vector<std::size_t> labels{0, 1, 1};
  EXPECT_NEAR(loss<double>(logits, labels, m, 0.0), std::log(2.0), 1e-15);
  m.final_weights = Matrix<double>(2, 1);
  m.final_bias = Matrix<double>(1, 2);
  EXPECT_NEAR(loss<double>(logits, labels, m, 0.15), std::log(2.0), 1e-15);
}

TEST(Loss, HandBuiltSingleExample) {
  CnnModel<double> m;
  m.final_weights = Matrix<double>(2, 1);
  m.final_weights(0, 0) = 1.0;
  m.final_weights(1, 0) = -2.0;
  m.final_bias = Matrix<double>(1, 2);
  m.final_bias[1] = 0.5;
  Matrix<double> logits(1, 2);
  logits(0, 0) = 2.0;
  logits(0, 1) = -1.0;
  const std::vector<std::size_t> labels{1};
  // -log(e^-1 / (e^2 + e^-1)) + 0.1/2 * (1 + 4 + 0.25)
  const double want = std::log(std::exp(2.0) + std::exp(-1.0)) + 1.0 + 0.05 * 5.25;
  EXPECT_NEAR(loss<double>(logits, labels, m, 0.1), want, 1e-14);
  EXPECT_EQ(kind_of([&] { loss<double>(Matrix<double>(), {}, m, 0.1); }), ErrorKind::kInvalidInput);
}

TEST(Loss, PermutingTheBatchKeepsLoss) {
  SeededRng rng(13);
  const auto m = random_model<double>(10, 4, {2, 3}, 5, 3, rng);
  const auto xs = random_examples(6, 7, 10, 3, rng);
  const auto masks = draw_dropout_masks<double>(6, m.penultimate_dim(), 0.5, rng);
  const auto a = forward(m, encode_batch(ptrs(xs), 7, 3), &masks);
  std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  std::vector<Example> ys;
  Matrix<double> pmasks(6, m.penultimate_dim());
  for (std::size_t i = 0; i < 6; ++i) {
    ys.push_back(xs[perm[i]]);
    std::copy(masks.row(perm[i]).begin(), masks.row(perm[i]).end(), pmasks.row(i).begin());
  }
  const auto eb = encode_batch(ptrs(ys), 7, 3);
  const auto b = forward(m, eb, &pmasks);
  std::vector<std::size_t> la, lb;
  for (const auto& x : xs) la.push_back(x.label);
  for (const auto& y : ys) lb.push_back(y.label);
  EXPECT_NEAR(loss<double>(a.logits, la, m, 0.15), loss<double>(b.logits, lb, m, 0.15), 1e-12);
}

// -------------------------------------------------------------- backward

using wordcnn::testing::cnn_gradient_error;

TEST(Backward, MatchesFiniteDifferencesOnTwoSentences) {
  SeededRng rng(14);
  auto m = random_model<double>(6, 3, {2, 3}, 3, 2, rng);
  const auto xs = random_examples(2, 5, 6, 2, rng);
  EXPECT_LT(cnn_gradient_error(m, encode_batch(ptrs(xs), 5, 3), 0.15), 1e-4);
}

TEST(Backward, MatchesFiniteDifferencesOn20RandomInstances) {
  EXPECT_LT(wordcnn::testing::cnn_gradient_sweep(20, 15), 1e-4);
}

TEST(Backward, FrozenEmbeddingsHaveNoGradient) {
  SeededRng rng(16);
  const auto m = random_model<double>(6, 3, {2}, 3, 2, rng);
  const auto xs = random_examples(3, 4, 6, 2, rng);
  const auto b = encode_batch(ptrs(xs), 4, 2);
  const auto g = backward(m, forward(m, b), b, 0.0, false);
  EXPECT_TRUE(g.embeddings.empty());
  const auto g2 = backward(m, forward(m, b), b, 0.0, true);
  for (double x : g2.embeddings.row(Vocabulary::kPad)) EXPECT_EQ(x, 0.0);
}

TEST(Backward, DuplicateExampleDoublesItsContribution) {
  SeededRng rng(17);
  const auto m = random_model<double>(8, 3, {2, 3}, 4, 3, rng);
  const auto xs = random_examples(2, 5, 8, 3, rng);
  auto grads_of = [&](std::vector<Example> ys) {
    const auto b = encode_batch(ptrs(ys), 5, 3);
    return backward(m, forward(m, b), b, 0.0, true);
  };
  const auto ab = grads_of({xs[0], xs[1]});
  const auto aab = grads_of({xs[0], xs[0], xs[1]});
  const auto a = grads_of({xs[0]});
  // 3 * g(AAB) - 2 * g(AB) isolates the extra copy of A.
  auto check = [&](const Matrix<double>& g3, const Matrix<double>& g2, const Matrix<double>& g1) {
    for (std::size_t i = 0; i < g1.size(); ++i) EXPECT_NEAR(3 * g3[i] - 2 * g2[i], g1[i], 1e-12);
  };
  check(aab.final_weights, ab.final_weights, a.final_weights);
  check(aab.final_bias, ab.final_bias, a.final_bias);
  check(aab.embeddings, ab.embeddings, a.embeddings);
  for (std::size_t i = 0; i < m.banks.size(); ++i) {
    check(aab.bank_weights[i], ab.bank_weights[i], a.bank_weights[i]);
  }
}

TEST(Dropout, MaskedFeaturesAverageToUndropped) {
  SeededRng rng(18);
  const auto m = random_model<double>(8, 4, {2, 3}, 10, 2, rng);
  const auto xs = random_examples(1, 6, 8, 2, rng);
  const auto b = encode_batch(ptrs(xs), 6, 3);
  const auto plain = forward(m, b);
  std::vector<double> mean(m.penultimate_dim(), 0.0);
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    const auto masks = draw_dropout_masks<double>(1, m.penultimate_dim(), 0.5, rng);
    const auto c = forward(m, b, &masks);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += c.dropped[j] / draws;
  }
  double diff = 0.0, base = 0.0;
  for (std::size_t j = 0; j < mean.size(); ++j) {
    diff += (mean[j] - plain.penultimate[j]) * (mean[j] - plain.penultimate[j]);
    base += plain.penultimate[j] * plain.penultimate[j];
  }
  ASSERT_GT(base, 0.0);
  EXPECT_LT(std::sqrt(diff / base), 0.02);
}

// --------------------------------------------------------------- training

TEST(Train, SeparableToyReachesPerfectTrainingAccuracy) {
  const auto ds = cue_dataset(10, 19);
  auto data = fixed_split_data(ds);
  CnnConfig c;  // stock recipe, narrow embeddings
  c.embedding_dim = 16;
  const auto r = train<double>(data, c);
  const auto ev = evaluate(r.model, data.train, data.max_length);
  EXPECT_EQ(ev.accuracy, 1.0);
  ASSERT_EQ(r.history.size(), 25u);
  EXPECT_LT(r.history.back().train_loss, r.history.front().train_loss);
}

TEST(Train, ZeroEpochsIsInitializationAndStillEvaluates) {
  const auto ds = cue_dataset(10, 20);
  auto data = fixed_split_data(ds);
  data.test = data.train;
  auto c = small_config();
  c.epochs = 0;
  const auto r = train<float>(data, c);
  EXPECT_TRUE(r.history.empty());
  for (float x : r.model.final_weights.values()) EXPECT_EQ(x, 0.0f);
  // Zero final layer: every logit ties, so everything is class 0.
  EXPECT_EQ(evaluate(r.model, data.test, data.max_length).accuracy, 0.5);
}

TEST(Train, StaticVariantNeverTouchesEmbeddings) {
  const auto ds = cue_dataset(15, 21);
  const auto data = fixed_split_data(ds);
  Matrix<float> pv(3, 16);
  SeededRng vr(22);
  fill_uniform(pv.values(), vr, -1, 1);
  const embeddings::WordVectors pre({"film", "cue0_1", "plot"}, pv);
  auto c = small_config();
  c.variant = Variant::kStatic;
  c.epochs = 0;
  const auto before = train<float>(data, c, &pre);
  c.epochs = 3;
  const auto after = train<float>(data, c, &pre);
  EXPECT_EQ(after.model.embeddings, before.model.embeddings);
  EXPECT_NE(after.model.final_weights, before.model.final_weights);
}

TEST(Train, FineTuningKeepsPaddingRowZero) {
  const auto ds = cue_dataset(15, 23);
  auto c = small_config();
  c.epochs = 3;
  for (auto v : {Variant::kRand, Variant::kNonStatic}) {
    c.variant = v;
    const embeddings::WordVectors pre({"film"}, Matrix<float>(1, 16, 0.25f));
    const auto r = train<float>(fixed_split_data(ds), c, &pre);
    for (float x : r.model.embeddings.row(Vocabulary::kPad)) EXPECT_EQ(x, 0.0f);
  }
}

TEST(Train, SameSeedSameModel) {
  const auto ds = cue_dataset(12, 24);
  auto c = small_config();
  c.epochs = 2;
  const auto a = train<float>(fixed_split_data(ds), c);
  const auto b = train<float>(fixed_split_data(ds), c);
  EXPECT_EQ(a.model.final_weights, b.model.final_weights);
  EXPECT_EQ(a.model.embeddings, b.model.embeddings);
  c.seed = 2;
  const auto d = train<float>(fixed_split_data(ds), c);
  EXPECT_NE(a.model.final_weights, d.model.final_weights);
}

TEST(Evaluate, ConfusionAndTies) {
  const auto ds = cue_dataset(6, 25);
  SeededRng rng(26);
  auto m = init_model<float>(Matrix<float>(ds.vocab.size(), 4), small_config(), 2, rng);
  const auto all = all_of(ds.examples);
  auto ev = evaluate(m, all, ds.max_length());
  EXPECT_EQ(ev.accuracy, 0.5);
  EXPECT_EQ(ev.confusion[0][0], 6u);
  EXPECT_EQ(ev.confusion[1][0], 6u);
  EXPECT_NEAR(ev.loss, std::log(2.0), 1e-6);
  std::vector<const Example*> zeros;
  for (const auto* e : all) {
    if (e->label == 0) zeros.push_back(e);
  }
  EXPECT_EQ(evaluate(m, zeros, ds.max_length()).accuracy, 1.0);
  EXPECT_EQ(kind_of([&] { evaluate(m, {}, 5); }), ErrorKind::kInvalidInput);
}

TEST(RunCv, TwoFoldsOnFourExamples) {
  const auto ds = cue_dataset(2, 27);
  auto c = small_config();
  c.epochs = 2;
  const auto r = run_cv<float>(ds, c, 2, 9);
  EXPECT_EQ(r.fold_accuracy.size(), 2u);
  EXPECT_EQ(r.fold_history.size(), 2u);
  const auto again = run_cv<float>(ds, c, 2, 9);
  EXPECT_EQ(r.fold_accuracy, again.fold_accuracy);
  EXPECT_EQ(r.mean, again.mean);
}

TEST(RunCv, SampleStandardDeviation) {
  CvResult r;
  r.fold_accuracy = {0.5, 0.7, 0.9};
  summarize(r);
  EXPECT_NEAR(r.mean, 0.7, 1e-15);
  EXPECT_NEAR(r.stddev, 0.2, 1e-15);
}

// ------------------------------------------------------------- checkpoint

TEST(Checkpoint, RoundTripKeepsEveryTensor) {
  ScratchDir dir;
  const auto ds = cue_dataset(8, 28);
  auto c = small_config();
  c.epochs = 1;
  c.variant = Variant::kNonStatic;
  const embeddings::WordVectors pre({"film"}, Matrix<float>(1, 16, 0.5f));
  const auto r = train<float>(fixed_split_data(ds), c, &pre);
  save_checkpoint(dir / "m.ckpt", "toy", ds.label_names, ds.max_length(), c, ds.vocab, r.model);
  const auto ck = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(ck.dataset, "toy");
  EXPECT_EQ(ck.labels, ds.label_names);
  EXPECT_EQ(ck.max_length, ds.max_length());
  EXPECT_EQ(ck.config.variant, Variant::kNonStatic);
  EXPECT_EQ(ck.config.feature_maps, 8u);
  EXPECT_EQ(ck.config.filter_widths, c.filter_widths);
  EXPECT_EQ(ck.vocab.size(), ds.vocab.size());
  for (std::size_t id = 0; id < ds.vocab.size(); ++id) {
    EXPECT_EQ(ck.vocab.token_of(static_cast<text::WordId>(id)),
              ds.vocab.token_of(static_cast<text::WordId>(id)));
  }
  EXPECT_EQ(ck.model.embeddings, r.model.embeddings);
  ASSERT_EQ(ck.model.banks.size(), r.model.banks.size());
  for (std::size_t i = 0; i < r.model.banks.size(); ++i) {
    EXPECT_EQ(ck.model.banks[i].weights, r.model.banks[i].weights);
    EXPECT_EQ(ck.model.banks[i].bias, r.model.banks[i].bias);
  }
  EXPECT_EQ(ck.model.final_weights, r.model.final_weights);
  EXPECT_EQ(ck.model.final_bias, r.model.final_bias);
}

TEST(Checkpoint, CorruptFilesAreFormatErrors) {
  ScratchDir dir;
  wordcnn::testing::write_file(dir / "bad.ckpt", "NOT-A-CHECKPOINT 1\n");
  EXPECT_EQ(kind_of([&] { load_checkpoint(dir / "bad.ckpt"); }), ErrorKind::kFormat);
  const auto ds = cue_dataset(3, 29);
  SeededRng rng(30);
  const auto m = init_model<float>(Matrix<float>(ds.vocab.size(), 4), small_config(), 2, rng);
  save_checkpoint(dir / "m.ckpt", "toy", ds.label_names, 9, small_config(), ds.vocab, m);
  auto body = wordcnn::testing::read_file(dir / "m.ckpt");
  wordcnn::testing::write_file(dir / "cut.ckpt", body.substr(0, body.size() - 7));
  EXPECT_EQ(kind_of([&] { load_checkpoint(dir / "cut.ckpt"); }), ErrorKind::kFormat);
  EXPECT_EQ(kind_of([&] { load_checkpoint(dir / "missing.ckpt"); }), ErrorKind::kIo);
}
