#pragma once

// One experiment end to end: import, (optionally) balance, train and score
// by fixed split or k-fold CV, then write the run directory
//   <output_dir>/<dataset>-<variant>-<seed>-<timestamp>/
//     config.resolved   every setting, defaults materialized
//     metrics.tsv       epoch, split, loss, accuracy
//     summary.tsv       dataset, variant, model, accuracy, stddev, seed, runtime
//     report.md         results table
//     model.ckpt        fixed-split CNN runs, or CV runs with final_model

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "wordcnn/baselines/svm.hpp"
#include "wordcnn/baselines/tfidf.hpp"
#include "wordcnn/classifier/checkpoint.hpp"
#include "wordcnn/classifier/trainer.hpp"
#include "wordcnn/embeddings/vector_io.hpp"
#include "wordcnn/experiment/config.hpp"
#include "wordcnn/text/importers.hpp"
#include "wordcnn/text/split.hpp"

namespace wordcnn::experiment {

struct MetricsRow {
  int epoch = 0;
  std::string split;
  double loss = 0.0;
  double accuracy = 0.0;
};

inline std::string format_fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string format_metrics(const std::vector<MetricsRow>& rows) {
  std::string out = "epoch\tsplit\tloss\taccuracy\n";
  for (const auto& r : rows) {
    out += std::to_string(r.epoch) + '\t' + r.split + '\t' + format_fixed(r.loss) + '\t' +
           format_fixed(r.accuracy) + '\n';
  }
  return out;
}

struct Summary {
  std::string dataset;
  std::string variant;  // rand, static, non-static or svm
  std::string model;    // row label in result tables
  double accuracy = 0.0;
  double stddev = 0.0;  // across folds; 0 for a fixed split
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;
};

inline constexpr std::string_view kSummaryHeader =
    "dataset\tvariant\tmodel\taccuracy\tstddev\tseed\truntime_s";

inline std::string format_summary_row(const Summary& s) {
  return s.dataset + '\t' + s.variant + '\t' + s.model + '\t' + format_fixed(s.accuracy) +
         '\t' + format_fixed(s.stddev) + '\t' + std::to_string(s.seed) + '\t' +
         format_fixed(s.runtime_seconds, 1);
}

inline Summary parse_summary_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string part;
  while (std::getline(ss, part, '\t')) f.push_back(part);
  require(f.size() == 7, ErrorKind::kFormat, "malformed summary row: " + line);
  Summary s;
  s.dataset = f[0];
  s.variant = f[1];
  s.model = f[2];
  s.accuracy = std::stod(f[3]);
  s.stddev = std::stod(f[4]);
  s.seed = std::stoull(f[5]);
  s.runtime_seconds = std::stod(f[6]);
  return s;
}

inline std::string model_label(const ExperimentConfig& c) {
  if (c.model == ModelKind::kSvm) return "SVM+TF-IDF";
  return "CNN-" + std::string(classifier::to_string(c.cnn.variant));
}

/// Results in the layout of the published tables: one row per model, one
/// column per dataset, accuracy in percent. Datasets follow the canonical
/// order; a later summary for the same (model, dataset) replaces an earlier one.
inline std::string format_report(const std::vector<Summary>& summaries) {
  std::vector<std::string> models;
  std::set<std::string> present;
  std::map<std::pair<std::string, std::string>, const Summary*> cell;
  for (const auto& s : summaries) {
    if (std::find(models.begin(), models.end(), s.model) == models.end()) {
      models.push_back(s.model);
    }
    present.insert(s.dataset);
    cell[{s.model, s.dataset}] = &s;
  }
  std::vector<std::string> columns;
  for (auto name : text::dataset_names()) {
    if (present.count(std::string(name))) columns.emplace_back(name);
  }
  std::ostringstream os;
  os << "| Model |";
  for (const auto& c : columns) os << ' ' << c << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) os << "---|";
  os << '\n';
  for (const auto& m : models) {
    os << "| " << m << " |";
    for (const auto& c : columns) {
      const auto it = cell.find({m, c});
      if (it == cell.end()) {
        os << " - |";
        continue;
      }
      os << ' ' << format_fixed(100.0 * it->second->accuracy, 1);
      if (it->second->stddev > 0.0) os << " ± " << format_fixed(100.0 * it->second->stddev, 1);
      os << " |";
    }
    os << '\n';
  }
  return os.str();
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

struct RunOptions {
  std::string timestamp;        // empty: current UTC time
  std::ostream* log = nullptr;  // progress lines
};

struct RunOutcome {
  std::filesystem::path run_dir;
  Summary summary;
  std::vector<double> fold_accuracy;
  std::vector<MetricsRow> metrics;
  std::size_t truncated_test_sentences = 0;
};

/// Imports the configured dataset and applies balancing when enabled.
inline text::Dataset load_dataset(const ExperimentConfig& c) {
  auto ds = text::import_dataset(c.dataset, resolve_data_path(c));
  if (c.balanced()) ds = text::undersample_balance(ds, c.seed);
  return ds;
}

/// Pretrained rows for the dataset's vocabulary only. Config error when the
/// file is not configured or missing.
inline embeddings::WordVectors load_pretrained_for(const ExperimentConfig& c,
                                                   const text::Vocabulary& vocab) {
  const auto path = resolve_pretrained_path(c);
  require(!path.empty(), ErrorKind::kConfig,
          "variant " + std::string(classifier::to_string(c.cnn.variant)) +
              " needs pretrained vectors: set 'pretrained' or " + std::string(kPretrainedEnv));
  require(std::filesystem::exists(path), ErrorKind::kConfig,
          "pretrained vector file not found: " + path.string());
  std::unordered_set<std::string> wanted(vocab.tokens().begin() + text::Vocabulary::kReserved,
                                         vocab.tokens().end());
  embeddings::VectorReadOptions opts;
  opts.filter = &wanted;
  opts.max_words = c.pretrained_max_words;
  return embeddings::read_vectors_binary(path, opts);
}

namespace detail {

inline void append_epoch_rows(std::vector<MetricsRow>& rows, const std::string& prefix,
                              const classifier::EpochMetrics& m) {
  rows.push_back({m.epoch, prefix + "train", m.train_loss, m.train_accuracy});
  if (m.test) rows.push_back({m.epoch, prefix + "test", m.test->loss, m.test->accuracy});
}

inline std::vector<std::vector<std::string>> token_strings(
    const text::Vocabulary& vocab, const std::vector<const text::Example*>& examples) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(examples.size());
  for (const auto* ex : examples) {
    std::vector<std::string> d;
    d.reserve(ex->tokens.size());
    for (auto id : ex->tokens) d.push_back(vocab.token_of(id));
    docs.push_back(std::move(d));
  }
  return docs;
}

/// Mean over examples of the summed one-vs-rest hinge losses.
inline double ovr_hinge(const baselines::LinearSvm& svm,
                        const std::vector<baselines::SparseVector>& xs,
                        const std::vector<std::size_t>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto s = baselines::svm_scores(svm, xs[i]);
    for (std::size_t c = 0; c < s.size(); ++c) {
      const double y = labels[i] == c ? 1.0 : -1.0;
      total += std::max(0.0, 1.0 - y * s[c]);
    }
  }
  return total / static_cast<double>(xs.size());
}

struct SvmSplitResult {
  double accuracy = 0.0;
  MetricsRow train;
  MetricsRow test;
};

inline SvmSplitResult svm_split(const text::Vocabulary& vocab,
                                const std::vector<const text::Example*>& train,
                                const std::vector<const text::Example*>& test,
                                const baselines::SvmConfig& config, const std::string& prefix) {
  auto [tfidf, train_x] = baselines::tfidf_fit_transform(token_strings(vocab, train));
  const auto test_x = tfidf.transform_all(token_strings(vocab, test));
  std::vector<std::size_t> train_y, test_y;
  for (const auto* ex : train) train_y.push_back(ex->label);
  for (const auto* ex : test) test_y.push_back(ex->label);
  const auto svm = baselines::svm_train(train_x, train_y, tfidf.dim(), config);
  SvmSplitResult r;
  r.accuracy = baselines::svm_accuracy(svm, test_x, test_y);
  r.train = {config.epochs, prefix + "train", ovr_hinge(svm, train_x, train_y),
             baselines::svm_accuracy(svm, train_x, train_y)};
  r.test = {config.epochs, prefix + "test", ovr_hinge(svm, test_x, test_y), r.accuracy};
  return r;
}

inline void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  out << body;
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + path.string());
}

inline std::filesystem::path make_run_dir(const ExperimentConfig& c, const std::string& stamp) {
  const std::string base =
      c.dataset + "-" + c.run_label() + "-" + std::to_string(c.seed) + "-" + stamp;
  std::filesystem::create_directories(c.output_dir);
  auto dir = c.output_dir / base;
  for (int n = 2; std::filesystem::exists(dir); ++n) {
    dir = c.output_dir / (base + "-" + std::to_string(n));
  }
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace detail

inline RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options = {}) {
  validate(config);
  const auto started = std::chrono::steady_clock::now();
  std::ostream& log = options.log ? *options.log : std::clog;

  const auto ds = load_dataset(config);
  log << "dataset " << ds.name << ": " << ds.size() << " sentences, "
      << ds.vocab.word_count() << " words, " << ds.class_count() << " classes, "
      << (ds.has_fixed_split() ? "fixed split" : std::to_string(config.folds) + "-fold CV")
      << '\n';

  CnnConfig cnn = config.cnn;
  cnn.epochs = config.resolved_epochs();
  cnn.seed = config.seed;

  std::optional<embeddings::WordVectors> pretrained;
  if (config.model == ModelKind::kCnn && classifier::uses_pretrained(cnn.variant)) {
    pretrained = load_pretrained_for(config, ds.vocab);
    log << "pretrained vectors: " << pretrained->size() << " of " << ds.vocab.word_count()
        << " words found\n";
  }
  const embeddings::WordVectors* pre = pretrained ? &*pretrained : nullptr;

  RunOutcome out;
  out.summary.dataset = ds.name;
  out.summary.variant = config.run_label();
  out.summary.model = model_label(config);
  out.summary.seed = config.seed;
  out.run_dir = detail::make_run_dir(
      config, options.timestamp.empty() ? utc_timestamp() : options.timestamp);
  detail::write_text(out.run_dir / "config.resolved", format_resolved(config));

  auto log_epoch = [&](const std::string& where, const classifier::EpochMetrics& m) {
    log << where << "epoch " << m.epoch << " lr " << m.learning_rate << " train loss "
        << format_fixed(m.train_loss, 4) << " acc " << format_fixed(m.train_accuracy, 4);
    if (m.test) log << " test acc " << format_fixed(m.test->accuracy, 4);
    log << '\n';
  };

  auto save = [&](const classifier::CnnModel<float>& model) {
    classifier::save_checkpoint(out.run_dir / "model.ckpt", ds.name, ds.label_names,
                                ds.max_length(), cnn, ds.vocab, model);
  };

  if (ds.has_fixed_split()) {
    const auto data = classifier::fixed_split_data(ds);
    if (config.model == ModelKind::kCnn) {
      const auto result = classifier::train<float>(
          data, cnn, pre, [&](const classifier::EpochMetrics& m) { log_epoch("", m); });
      for (const auto& m : result.history) detail::append_epoch_rows(out.metrics, "", m);
      out.summary.accuracy =
          classifier::evaluate(result.model, data.test, data.max_length).accuracy;
      out.truncated_test_sentences = result.truncated_test_sentences;
      save(result.model);
    } else {
      const auto r = detail::svm_split(ds.vocab, data.train, data.test, config.svm, "");
      out.metrics.push_back(r.train);
      out.metrics.push_back(r.test);
      out.summary.accuracy = r.accuracy;
    }
    out.fold_accuracy = {out.summary.accuracy};
  } else {
    classifier::CvResult cv;
    if (config.model == ModelKind::kCnn) {
      cv = classifier::run_cv<float>(
          ds, cnn, config.folds, config.seed, pre,
          [&](std::size_t f, const classifier::EpochMetrics& m) {
            log_epoch("fold " + std::to_string(f + 1) + " ", m);
            detail::append_epoch_rows(out.metrics, "fold" + std::to_string(f + 1) + ":", m);
          });
    } else {
      const auto folds = text::kfold_split(ds, config.folds, config.seed);
      for (std::size_t f = 0; f < folds.size(); ++f) {
        auto train = classifier::select(ds.examples, folds[f].train);
        for (const auto& ex : ds.extra_train) train.push_back(&ex);
        const auto test = classifier::select(ds.examples, folds[f].test);
        const auto r = detail::svm_split(ds.vocab, train, test, config.svm,
                                         "fold" + std::to_string(f + 1) + ":");
        out.metrics.push_back(r.train);
        out.metrics.push_back(r.test);
        cv.fold_accuracy.push_back(r.accuracy);
        log << "fold " << f + 1 << " accuracy " << format_fixed(r.accuracy, 4) << '\n';
      }
      classifier::summarize(cv);
    }
    out.fold_accuracy = cv.fold_accuracy;
    out.summary.accuracy = cv.mean;
    out.summary.stddev = cv.stddev;
    if (config.model == ModelKind::kCnn && config.final_model) {
      classifier::TrainingData all;
      all.vocab = &ds.vocab;
      all.classes = ds.class_count();
      all.max_length = ds.max_length();
      all.train = classifier::all_of(ds.examples);
      for (const auto& ex : ds.extra_train) all.train.push_back(&ex);
      save(classifier::train<float>(all, cnn, pre).model);
    }
  }
  if (out.truncated_test_sentences > 0) {
    log << "warning: " << out.truncated_test_sentences
        << " test sentences were longer than n and were truncated\n";
  }

  out.summary.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  detail::write_text(out.run_dir / "metrics.tsv", format_metrics(out.metrics));
  detail::write_text(out.run_dir / "summary.tsv", std::string(kSummaryHeader) + '\n' +
                                                      format_summary_row(out.summary) + '\n');
  detail::write_text(out.run_dir / "report.md", format_report({out.summary}));
  log << out.summary.model << " on " << ds.name << ": accuracy "
      << format_fixed(100.0 * out.summary.accuracy, 2) << "%\n";
  return out;
}

/// Summaries from run directories (or directories containing runs).
inline std::vector<Summary> collect_summaries(const std::vector<std::filesystem::path>& roots) {
  std::vector<std::filesystem::path> files;
  for (const auto& root : roots) {
    if (std::filesystem::is_regular_file(root)) {
      files.push_back(root);
    } else if (std::filesystem::exists(root / "summary.tsv")) {
      files.push_back(root / "summary.tsv");
    } else if (std::filesystem::is_directory(root)) {
      for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
        if (e.is_regular_file() && e.path().filename() == "summary.tsv") files.push_back(e.path());
      }
    } else {
      fail(ErrorKind::kNotFound, "no such run directory: " + root.string());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Summary> out;
  for (const auto& f : files) {
    const auto lines = text::read_lines(f);
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (!lines[i].empty()) out.push_back(parse_summary_row(lines[i]));
    }
  }
  return out;
}

}  // namespace wordcnn::experiment
