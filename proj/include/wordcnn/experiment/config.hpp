#pragma once

// Experiment configuration: a flat `key = value` file with optional
// [section] headers (experiment, cnn, svm). Keys outside any section are
// looked up in experiment, then cnn, then svm. '#' starts a comment.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wordcnn/baselines/svm.hpp"
#include "wordcnn/classifier/checkpoint.hpp"
#include "wordcnn/classifier/config.hpp"
#include "wordcnn/error.hpp"
#include "wordcnn/text/importers.hpp"

namespace wordcnn::experiment {

using classifier::CnnConfig;
using classifier::Variant;

inline constexpr std::string_view kDataDirEnv = "WORDCNN_DATA_DIR";
inline constexpr std::string_view kPretrainedEnv = "WORDCNN_PRETRAINED";

struct ConfigEntry {
  std::string section;  // empty when the key precedes every header
  std::string key;
  std::string value;
  std::size_t line = 0;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::optional<std::string> getenv_nonempty(std::string_view name) {
  const char* v = std::getenv(std::string(name).c_str());
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

}  // namespace detail

inline std::vector<ConfigEntry> parse_config_text(std::string_view text,
                                                  const std::string& origin = "<config>") {
  std::vector<ConfigEntry> out;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      require(line.back() == ']' && line.size() > 2, ErrorKind::kConfig,
              where + ": malformed section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::kConfig, where + ": expected key = value");
    ConfigEntry e{section, detail::trim(std::string_view(line).substr(0, eq)),
                  detail::trim(std::string_view(line).substr(eq + 1)), line_no};
    require(!e.key.empty(), ErrorKind::kConfig, where + ": empty key");
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<ConfigEntry> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kConfig, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

enum class ModelKind { kCnn, kSvm };

inline std::string_view to_string(ModelKind m) { return m == ModelKind::kCnn ? "cnn" : "svm"; }

struct ExperimentConfig {
  std::string dataset;
  std::filesystem::path data;  // empty: $WORDCNN_DATA_DIR/<dataset dir>
  ModelKind model = ModelKind::kCnn;
  std::uint64_t seed = 1;
  std::size_t folds = 10;
  std::optional<bool> balance;  // unset: on for Irony only
  std::filesystem::path pretrained;
  std::size_t pretrained_max_words = 0;  // 0 reads the whole file
  bool deterministic = false;
  bool final_model = false;  // cross-validated sets: also fit one model on everything
  std::filesystem::path output_dir = "runs";
  CnnConfig cnn;
  bool epochs_from_table = true;
  baselines::SvmConfig svm;

  bool balanced() const { return balance.value_or(dataset == "Irony"); }

  /// Epochs actually used: the explicit value or the per-dataset table.
  int resolved_epochs() const {
    return epochs_from_table ? classifier::default_epochs(dataset, cnn.variant) : cnn.epochs;
  }

  std::string run_label() const {
    return model == ModelKind::kSvm ? "svm" : std::string(classifier::to_string(cnn.variant));
  }
};

/// Subdirectory of the data root holding a dataset's files.
inline std::string dataset_directory(std::string_view dataset) {
  if (dataset == "SST-1" || dataset == "SST-2") return "SST";
  return std::string(dataset);
}

inline std::filesystem::path data_root() {
  if (auto env = detail::getenv_nonempty(kDataDirEnv)) return *env;
  return "data";
}

inline std::filesystem::path resolve_data_path(const ExperimentConfig& c) {
  if (!c.data.empty()) return c.data;
  return data_root() / dataset_directory(c.dataset);
}

/// The pretrained vector file: the environment override wins over the
/// config value. Empty when neither is set.
inline std::filesystem::path resolve_pretrained_path(const ExperimentConfig& c) {
  if (auto env = detail::getenv_nonempty(kPretrainedEnv)) return *env;
  return c.pretrained;
}

namespace detail {

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorKind::kConfig, "bad boolean for '" + key + "': " + v);
}

inline bool apply_experiment_key(ExperimentConfig& c, const std::string& key,
                                 const std::string& value) {
  using classifier::detail::parse_number;
  if (key == "dataset") {
    c.dataset = value;
  } else if (key == "data") {
    c.data = value;
  } else if (key == "model") {
    if (value == "cnn") {
      c.model = ModelKind::kCnn;
    } else if (value == "svm") {
      c.model = ModelKind::kSvm;
    } else {
      fail(ErrorKind::kConfig, "unknown model '" + value + "'; valid: cnn, svm");
    }
  } else if (key == "variant") {
    c.cnn.variant = classifier::parse_variant(value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "folds") {
    c.folds = parse_number<std::size_t>(key, value);
  } else if (key == "balance") {
    if (value == "auto") {
      c.balance.reset();
    } else {
      c.balance = parse_bool(key, value);
    }
  } else if (key == "pretrained") {
    c.pretrained = value;
  } else if (key == "pretrained_max_words") {
    c.pretrained_max_words = parse_number<std::size_t>(key, value);
  } else if (key == "deterministic") {
    c.deterministic = parse_bool(key, value);
  } else if (key == "final_model") {
    c.final_model = parse_bool(key, value);
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else {
    return false;
  }
  return true;
}

inline bool apply_cnn_key(ExperimentConfig& c, const std::string& key,
                          const std::string& value) {
  // The run seed and variant live under [experiment].
  if (key == "seed" || key == "variant") return false;
  if (key == "epochs") {
    c.epochs_from_table = value == "auto";
    if (!c.epochs_from_table) c.cnn.epochs = classifier::detail::parse_number<int>(key, value);
    return true;
  }
  return classifier::apply_config_entry(c.cnn, key, value);
}

inline bool apply_svm_key(ExperimentConfig& c, const std::string& key,
                          const std::string& value) {
  using classifier::detail::parse_number;
  if (key == "lambda") {
    c.svm.lambda = parse_number<double>(key, value);
  } else if (key == "svm_epochs" || key == "epochs") {
    c.svm.epochs = parse_number<int>(key, value);
  } else {
    return false;
  }
  return true;
}

}  // namespace detail

/// Applies one entry; an unknown key is a config error naming it.
inline void apply_entry(ExperimentConfig& c, const ConfigEntry& e) {
  bool ok = false;
  if (e.section == "experiment") {
    ok = detail::apply_experiment_key(c, e.key, e.value);
  } else if (e.section == "cnn") {
    ok = detail::apply_cnn_key(c, e.key, e.value);
  } else if (e.section == "svm") {
    ok = detail::apply_svm_key(c, e.key, e.value);
  } else if (e.section.empty()) {
    // "epochs" without a section means the classifier's.
    ok = detail::apply_experiment_key(c, e.key, e.value) ||
         detail::apply_cnn_key(c, e.key, e.value) ||
         (e.key != "epochs" && detail::apply_svm_key(c, e.key, e.value));
  } else {
    fail(ErrorKind::kConfig, "line " + std::to_string(e.line) + ": unknown section [" +
                                 e.section + "]");
  }
  if (!ok) {
    const std::string name = e.section.empty() ? e.key : e.section + "." + e.key;
    fail(ErrorKind::kConfig,
         "line " + std::to_string(e.line) + ": unknown config key '" + name + "'");
  }
}

inline void validate(const ExperimentConfig& c) {
  require(!c.dataset.empty(), ErrorKind::kConfig, "config: 'dataset' is required");
  require(text::is_known_dataset(c.dataset), ErrorKind::kConfig,
          "unknown dataset '" + c.dataset + "'; valid names: " + text::known_dataset_list());
  require(c.folds >= 2, ErrorKind::kConfig, "config: folds must be >= 2");
  c.cnn.validate();
  c.svm.validate();
}

inline ExperimentConfig load_config(const std::vector<ConfigEntry>& entries) {
  ExperimentConfig c;
  for (const auto& e : entries) apply_entry(c, e);
  c.cnn.seed = c.seed;
  c.svm.seed = c.seed;
  validate(c);
  return c;
}

inline ExperimentConfig load_config_file(const std::filesystem::path& path) {
  return load_config(parse_config_file(path));
}

/// Every field with defaults materialized. Feeding this text back through
/// load_config gives the same experiment.
inline std::string format_resolved(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[experiment]\n"
     << "dataset = " << c.dataset << '\n'
     << "data = " << resolve_data_path(c).string() << '\n'
     << "model = " << to_string(c.model) << '\n'
     << "variant = " << classifier::to_string(c.cnn.variant) << '\n'
     << "seed = " << c.seed << '\n'
     << "folds = " << c.folds << '\n'
     << "balance = " << (c.balanced() ? "true" : "false") << '\n'
     << "pretrained = " << resolve_pretrained_path(c).string() << '\n'
     << "pretrained_max_words = " << c.pretrained_max_words << '\n'
     << "deterministic = " << (c.deterministic ? "true" : "false") << '\n'
     << "final_model = " << (c.final_model ? "true" : "false") << '\n'
     << "output_dir = " << c.output_dir.string() << '\n';
  os << "\n[cnn]\n";
  CnnConfig cnn = c.cnn;
  cnn.epochs = c.resolved_epochs();
  for (const auto& [k, v] : classifier::config_entries(cnn)) {
    if (k == "seed" || k == "variant") continue;
    os << k << " = " << v << '\n';
  }
  os << "\n[svm]\n"
     << "lambda = " << classifier::format_double(c.svm.lambda) << '\n'
     << "epochs = " << c.svm.epochs << '\n';
  return os.str();
}

}  // namespace wordcnn::experiment
