// wordcnn: command-line front end.
//
// Exit codes: 0 success, 1 unexpected failure, 2 configuration or usage
// error, 3 data error (missing, malformed or out-of-vocabulary input),
// 4 numeric fault during training.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wordcnn/classifier/checkpoint.hpp"
#include "wordcnn/classifier/trainer.hpp"
#include "wordcnn/embeddings/query.hpp"
#include "wordcnn/embeddings/skipgram.hpp"
#include "wordcnn/embeddings/vector_io.hpp"
#include "wordcnn/experiment/config.hpp"
#include "wordcnn/experiment/runner.hpp"
#include "wordcnn/text/dataset.hpp"
#include "wordcnn/text/importers.hpp"

namespace {

using namespace wordcnn;

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return kExitConfig;
    case ErrorKind::kInvalidInput:
    case ErrorKind::kNotFound:
    case ErrorKind::kFormat:
    case ErrorKind::kParse:
    case ErrorKind::kIo: return kExitData;
    case ErrorKind::kNumericFault: return kExitNumeric;
    default: return kExitOther;
  }
}

std::filesystem::path source_for(const std::string& dataset, const std::string& data) {
  experiment::ExperimentConfig c;
  c.dataset = dataset;
  c.data = data;
  return experiment::resolve_data_path(c);
}

// Experiment flags shared by train-classifier and baseline. Values given on
// the command line are applied after the config file.
struct ExperimentFlags {
  std::string config_file;
  std::string dataset, data, variant, pretrained, output_dir, filter_widths, balance;
  std::optional<std::uint64_t> seed;
  int epochs = -1;
  std::size_t folds = 0, feature_maps = 0, batch_size = 0, embedding_dim = 0;
  std::size_t pretrained_max_words = 0;
  double dropout = -1, l2 = -1, lambda = -1;
  bool deterministic = false, final_model = false;

  void add(CLI::App* cmd, bool cnn) {
    cmd->add_option("-c,--config", config_file, "experiment config file");
    cmd->add_option("--dataset", dataset, "dataset name");
    cmd->add_option("--data", data, "dataset source path");
    cmd->add_option("--seed", seed, "run seed");
    cmd->add_option("--folds", folds, "cross-validation folds");
    cmd->add_option("--balance", balance, "undersample to equal classes: auto|true|false");
    cmd->add_option("--output-dir", output_dir, "parent directory for run directories");
    cmd->add_flag("--deterministic", deterministic, "single-threaded reproducible run");
    if (cnn) {
      cmd->add_option("--variant", variant, "rand | static | non-static");
      cmd->add_option("--pretrained", pretrained, "pretrained binary vector file");
      cmd->add_option("--pretrained-max-words", pretrained_max_words,
                      "read only the first N pretrained vectors");
      cmd->add_option("--epochs", epochs, "epochs (default: per-dataset table)");
      cmd->add_option("--filter-widths", filter_widths, "comma-separated widths");
      cmd->add_option("--feature-maps", feature_maps, "filters per width");
      cmd->add_option("--dropout", dropout, "dropout rate on the penultimate layer");
      cmd->add_option("--l2", l2, "l2 coefficient on the final layer");
      cmd->add_option("--batch-size", batch_size, "mini-batch size");
      cmd->add_option("--embedding-dim", embedding_dim, "word vector dimension");
      cmd->add_flag("--final-model", final_model,
                    "after CV, fit one model on all data and save it");
    } else {
      cmd->add_option("--lambda", lambda, "SVM regularization constant");
      cmd->add_option("--epochs", epochs, "SVM epochs");
    }
  }

  experiment::ExperimentConfig resolve(bool cnn) const {
    std::vector<experiment::ConfigEntry> entries;
    if (!config_file.empty()) entries = experiment::parse_config_file(config_file);
    auto put = [&](const std::string& section, const std::string& key, const std::string& v) {
      entries.push_back({section, key, v, 0});
    };
    put("experiment", "model", cnn ? "cnn" : "svm");
    if (!dataset.empty()) put("experiment", "dataset", dataset);
    if (!data.empty()) put("experiment", "data", data);
    if (seed) put("experiment", "seed", std::to_string(*seed));
    if (folds) put("experiment", "folds", std::to_string(folds));
    if (!balance.empty()) put("experiment", "balance", balance);
    if (!output_dir.empty()) put("experiment", "output_dir", output_dir);
    if (deterministic) put("experiment", "deterministic", "true");
    if (cnn) {
      if (!variant.empty()) put("experiment", "variant", variant);
      if (!pretrained.empty()) put("experiment", "pretrained", pretrained);
      if (pretrained_max_words) {
        put("experiment", "pretrained_max_words", std::to_string(pretrained_max_words));
      }
      if (final_model) put("experiment", "final_model", "true");
      if (epochs >= 0) put("cnn", "epochs", std::to_string(epochs));
      if (!filter_widths.empty()) put("cnn", "filter_widths", filter_widths);
      if (feature_maps) put("cnn", "feature_maps", std::to_string(feature_maps));
      if (dropout >= 0) put("cnn", "dropout", classifier::format_double(dropout));
      if (l2 >= 0) put("cnn", "l2", classifier::format_double(l2));
      if (batch_size) put("cnn", "batch_size", std::to_string(batch_size));
      if (embedding_dim) put("cnn", "embedding_dim", std::to_string(embedding_dim));
    } else {
      if (lambda >= 0) put("svm", "lambda", classifier::format_double(lambda));
      if (epochs >= 0) put("svm", "epochs", std::to_string(epochs));
    }
    return experiment::load_config(entries);
  }
};

int run_experiment_command(const ExperimentFlags& flags, bool cnn) {
  const auto config = flags.resolve(cnn);
  const auto outcome = experiment::run_experiment(config, {{}, &std::cerr});
  std::cout << experiment::kSummaryHeader << '\n'
            << experiment::format_summary_row(outcome.summary) << '\n'
            << "run directory: " << outcome.run_dir.string() << '\n';
  return 0;
}

void print_neighbors(const std::vector<embeddings::Neighbor>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::printf("%3zu  %-30s %.6f\n", i + 1, rows[i].word.c_str(), rows[i].similarity);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"word embeddings and convolutional sentence classification"};
  app.require_subcommand(1);

  // import
  std::string imp_name, imp_source, imp_out;
  auto* imp = app.add_subcommand("import", "convert a dataset to canonical TSV");
  imp->add_option("dataset", imp_name, "dataset name")->required();
  imp->add_option("source", imp_source, "original files (default: data root)");
  imp->add_option("-o,--out", imp_out, "output directory")->required();

  // stats
  std::string st_name, st_data, st_vectors;
  std::size_t st_max_words = 0;
  auto* st = app.add_subcommand("stats", "summary statistics for a dataset");
  st->add_option("dataset", st_name, "dataset name")->required();
  st->add_option("--data", st_data, "dataset source path");
  st->add_option("--vectors", st_vectors, "pretrained vector file for |V_pre|");
  st->add_option("--max-words", st_max_words, "read only the first N vectors");

  // train-embeddings
  std::string te_corpus, te_out;
  embeddings::SgnsConfig sgns;
  bool te_det = false;
  auto* te = app.add_subcommand("train-embeddings", "train skip-gram vectors");
  te->add_option("--corpus", te_corpus, "whitespace-tokenized text")->required();
  te->add_option("-o,--out", te_out, "binary vector output file")->required();
  te->add_option("--dim", sgns.dim, "vector dimension")->capture_default_str();
  te->add_option("--window", sgns.window, "context window")->capture_default_str();
  te->add_option("--negatives", sgns.negatives, "negatives per pair")->capture_default_str();
  te->add_option("--epochs", sgns.epochs, "passes over the corpus")->capture_default_str();
  te->add_option("--lr", sgns.learning_rate, "initial learning rate")->capture_default_str();
  te->add_option("--min-count", sgns.min_count, "drop rarer words")->capture_default_str();
  te->add_option("--subsample", sgns.subsample, "subsampling threshold, 0 = off")
      ->capture_default_str();
  te->add_option("--seed", sgns.seed, "seed")->capture_default_str();
  te->add_option("--threads", sgns.threads, "worker threads")->capture_default_str();
  te->add_flag("--deterministic", te_det, "force one thread");

  // train-classifier / baseline
  ExperimentFlags cnn_flags, svm_flags;
  auto* tc = app.add_subcommand("train-classifier", "run a CNN experiment");
  cnn_flags.add(tc, true);
  auto* bl = app.add_subcommand("baseline", "run the TF-IDF + linear SVM baseline");
  svm_flags.add(bl, false);

  // evaluate
  std::string ev_model, ev_dataset, ev_data;
  auto* ev = app.add_subcommand("evaluate", "score a saved model on a dataset");
  ev->add_option("--model", ev_model, "checkpoint file")->required();
  ev->add_option("--dataset", ev_dataset, "dataset name (default: the model's)");
  ev->add_option("--data", ev_data, "dataset source path");

  // query
  std::string q_vectors, q_mode;
  std::vector<std::string> q_words;
  std::size_t q_top = 10, q_max_words = 0;
  auto* q = app.add_subcommand("query", "nearest neighbors, analogies, similarity");
  q->add_option("vectors", q_vectors, "binary vector file")->required();
  q->add_option("mode", q_mode, "neighbors | analogy | similarity")
      ->required()
      ->check(CLI::IsMember({"neighbors", "analogy", "similarity"}));
  q->add_option("words", q_words, "query words")->required();
  q->add_option("--top", q_top, "rows to print")->capture_default_str();
  q->add_option("--max-words", q_max_words, "read only the first N vectors");

  // report
  std::vector<std::string> rp_paths;
  auto* rp = app.add_subcommand("report", "results table from run directories");
  rp->add_option("runs", rp_paths, "run directories or parents")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*imp) {
    const auto ds = text::import_dataset(imp_name, imp_source.empty()
                                                       ? source_for(imp_name, "")
                                                       : std::filesystem::path(imp_source));
    text::write_canonical(ds, imp_out);
    std::cout << text::format_stats_row(text::compute_stats(ds)) << '\n';
    return 0;
  }
  if (*st) {
    const auto ds = text::import_dataset(st_name, source_for(st_name, st_data));
    std::optional<std::unordered_set<std::string>> pre;
    if (!st_vectors.empty()) pre = embeddings::read_vector_vocabulary(st_vectors, st_max_words);
    std::cout << "dataset\tc\tl\tN\t|V|\t|V_pre|\tTest\n"
              << text::format_stats_row(text::compute_stats(ds, pre ? &*pre : nullptr)) << '\n';
    return 0;
  }
  if (*te) {
    if (te_det) sgns.threads = 1;
    std::vector<std::vector<std::string>> sentences;
    for (const auto& line : text::read_lines(te_corpus)) {
      std::istringstream ss(line);
      std::vector<std::string> toks;
      for (std::string t; ss >> t;) toks.push_back(std::move(t));
      if (!toks.empty()) sentences.push_back(std::move(toks));
    }
    const auto result = embeddings::train_sgns<float>(sentences, sgns);
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
      std::cout << "epoch " << e + 1 << "\tloss " << result.epoch_loss[e] << '\n';
    }
    embeddings::write_vectors_binary(result.vectors, te_out);
    std::cout << "wrote " << result.vectors.size() << " vectors of dimension "
              << result.vectors.dim() << " to " << te_out << '\n';
    return 0;
  }
  if (*tc) return run_experiment_command(cnn_flags, true);
  if (*bl) return run_experiment_command(svm_flags, false);
  if (*ev) {
    const auto ck = classifier::load_checkpoint(ev_model);
    const std::string name = ev_dataset.empty() ? ck.dataset : ev_dataset;
    const auto ds = text::import_dataset(name, source_for(name, ev_data));
    require(ds.label_names == ck.labels, ErrorKind::kInvalidInput,
            "dataset labels do not match the model's");
    // Re-index the sentences with the model's vocabulary.
    std::vector<text::Example> remapped;
    for (const auto& ex : ds.has_fixed_split() ? ds.test : ds.examples) {
      text::Example r{{}, ex.label, ex.text};
      for (auto id : ex.tokens) r.tokens.push_back(ck.vocab.id_of(ds.vocab.token_of(id)));
      remapped.push_back(std::move(r));
    }
    const auto result =
        classifier::evaluate(ck.model, classifier::all_of(remapped), ck.max_length);
    std::cout << "accuracy\t" << experiment::format_fixed(result.accuracy) << '\n'
              << "correct\t" << result.correct << '\n'
              << "total\t" << result.total << '\n'
              << "confusion (rows gold, columns predicted)\n";
    for (std::size_t g = 0; g < result.confusion.size(); ++g) {
      std::cout << ck.labels[g];
      for (auto n : result.confusion[g]) std::cout << '\t' << n;
      std::cout << '\n';
    }
    return 0;
  }
  if (*q) {
    embeddings::VectorReadOptions opts;
    opts.max_words = q_max_words;
    const auto vectors = embeddings::read_vectors_binary(q_vectors, opts);
    if (q_mode == "neighbors") {
      require(q_words.size() == 1, ErrorKind::kConfig, "neighbors takes one word");
      print_neighbors(embeddings::nearest_neighbors(q_words[0], vectors, q_top));
    } else if (q_mode == "analogy") {
      require(q_words.size() == 3, ErrorKind::kConfig, "analogy takes three words: a b c");
      print_neighbors(embeddings::analogy(q_words[0], q_words[1], q_words[2], vectors, q_top));
    } else {
      require(q_words.size() == 2, ErrorKind::kConfig, "similarity takes two words");
      const double s = embeddings::cosine_similarity<float>(
          vectors.vector(vectors.require_index(q_words[0])),
          vectors.vector(vectors.require_index(q_words[1])));
      std::printf("%.6f\n", s);
    }
    return 0;
  }
  if (*rp) {
    std::vector<std::filesystem::path> roots(rp_paths.begin(), rp_paths.end());
    std::cout << experiment::format_report(experiment::collect_summaries(roots));
    return 0;
  }
  return kExitOther;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const wordcnn::Error& e) {
    std::cerr << "error (" << wordcnn::to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
}
