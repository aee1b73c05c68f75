#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ranges>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "wordcnn/error.hpp"
#include "wordcnn/text/tokenize.hpp"
#include "wordcnn/text/vocabulary.hpp"

namespace wordcnn::text {

struct Example {
  std::vector<WordId> tokens;
  std::size_t label = 0;
  std::string text;

  friend bool operator==(const Example&, const Example&) = default;
};

/// A labelled, tokenized sentence before ids are assigned.
struct LabelledText {
  std::string label;
  std::vector<std::string> tokens;
  std::string text;
};

/// A classification corpus. `examples` are the scored sentences (the whole
/// corpus for cross-validated sets, the training side otherwise); `test` is
/// the fixed test split when the benchmark has one; `extra_train` holds
/// training-only material such as treebank phrases.
struct Dataset {
  std::string name;
  std::vector<std::string> label_names;
  Vocabulary vocab;
  std::vector<Example> examples;
  std::vector<Example> test;
  std::vector<Example> extra_train;

  std::size_t class_count() const noexcept { return label_names.size(); }
  bool has_fixed_split() const noexcept { return !test.empty(); }
  std::size_t size() const noexcept { return examples.size() + test.size(); }

  /// Longest sentence over everything the model will see.
  std::size_t max_length() const {
    std::size_t n = 0;
    for (const auto* part : {&examples, &test, &extra_train}) {
      for (const auto& ex : *part) n = std::max(n, ex.tokens.size());
    }
    return n;
  }
};

namespace detail {

inline bool parse_integer(const std::string& s, long long& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

/// Class order used everywhere: numeric when every label is an integer,
/// byte order otherwise.
inline std::vector<std::string> order_labels(std::set<std::string> names) {
  std::vector<std::string> out(names.begin(), names.end());
  const bool numeric = std::all_of(out.begin(), out.end(), [](const auto& s) {
    long long v;
    return detail::parse_integer(s, v);
  });
  if (numeric) {
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      long long x, y;
      detail::parse_integer(a, x);
      detail::parse_integer(b, y);
      return x < y;
    });
  }
  return out;
}

/// Builds ids (min_count 1 over every part) and label indices. Label order
/// is `labels` when given (every label seen must be listed), else derived
/// from the labels present.
inline Dataset assemble_dataset(std::string name,
                                const std::vector<LabelledText>& train,
                                const std::vector<LabelledText>& test = {},
                                const std::vector<LabelledText>& extra = {},
                                const std::vector<std::string>& labels = {}) {
  std::set<std::string> names;
  std::vector<const std::vector<std::string>*> sentences;
  for (const auto* part : {&train, &test, &extra}) {
    for (const auto& item : *part) {
      names.insert(item.label);
      sentences.push_back(&item.tokens);
    }
  }
  require(!train.empty(), ErrorKind::kInvalidInput,
          "dataset " + name + ": no examples");

  Dataset ds;
  ds.name = std::move(name);
  if (labels.empty()) {
    ds.label_names = order_labels(std::move(names));
  } else {
    for (const auto& n : names) {
      require(std::find(labels.begin(), labels.end(), n) != labels.end(),
              ErrorKind::kInvalidInput, "dataset " + ds.name + ": unexpected label " + n);
    }
    ds.label_names = labels;
  }
  ds.vocab = build_vocab(
      sentences | std::views::transform(
                      [](const auto* p) -> const auto& { return *p; }),
      1);

  std::map<std::string, std::size_t> label_index;
  for (std::size_t i = 0; i < ds.label_names.size(); ++i) {
    label_index[ds.label_names[i]] = i;
  }
  auto convert = [&](const std::vector<LabelledText>& in,
                     std::vector<Example>& out) {
    out.reserve(in.size());
    for (const auto& item : in) {
      require(!item.tokens.empty(), ErrorKind::kInvalidInput,
              "dataset " + ds.name + ": empty example");
      out.push_back(
          {ds.vocab.encode(item.tokens), label_index.at(item.label), item.text});
    }
  };
  convert(train, ds.examples);
  convert(test, ds.test);
  convert(extra, ds.extra_train);
  return ds;
}

struct DatasetStats {
  std::string name;
  std::size_t classes = 0;
  std::size_t average_length = 0;
  std::size_t size = 0;
  std::size_t vocab_size = 0;
  std::optional<std::size_t> pretrained_hits;
  std::optional<std::size_t> test_size;  // nullopt means cross-validated
  double mean_length = 0.0;
};

/// Statistics over scored sentences (examples + test); `pretrained` is the
/// word list of a pretrained vector file, when available.
inline DatasetStats compute_stats(
    const Dataset& ds, const std::unordered_set<std::string>* pretrained = nullptr) {
  DatasetStats st;
  st.name = ds.name;
  st.classes = ds.class_count();
  st.size = ds.size();
  st.vocab_size = ds.vocab.word_count();
  std::size_t tokens = 0;
  for (const auto& ex : ds.examples) tokens += ex.tokens.size();
  for (const auto& ex : ds.test) tokens += ex.tokens.size();
  st.mean_length = st.size ? static_cast<double>(tokens) / st.size : 0.0;
  st.average_length = static_cast<std::size_t>(std::llround(st.mean_length));
  if (ds.has_fixed_split()) st.test_size = ds.test.size();
  if (pretrained) {
    std::size_t hits = 0;
    for (std::size_t id = Vocabulary::kReserved; id < ds.vocab.size(); ++id) {
      hits += pretrained->count(ds.vocab.token_of(static_cast<WordId>(id)));
    }
    st.pretrained_hits = hits;
  }
  return st;
}

/// One Table-1 style line: name, c, l, N, |V|, |V_pre| (or -), Test (or CV).
inline std::string format_stats_row(const DatasetStats& st) {
  std::ostringstream os;
  os << st.name << '\t' << st.classes << '\t' << st.average_length << '\t'
     << st.size << '\t' << st.vocab_size << '\t'
     << (st.pretrained_hits ? std::to_string(*st.pretrained_hits) : "-") << '\t'
     << (st.test_size ? std::to_string(*st.test_size) : "CV");
  return os.str();
}

/// Reads a text file as lines (LF or CRLF); a missing file is a parse error
/// naming the path.
inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kParse,
          "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

// ---------------------------------------------------------------------------
// Canonical TSV: `label<TAB>text`, UTF-8, LF, one example per line. A
// dataset directory holds train.tsv, and optionally test.tsv and
// phrases.tsv (training-only examples).

inline std::vector<LabelledText> read_canonical_file(
    const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<LabelledText> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.empty() && i + 1 == lines.size()) break;
    const auto where = path.string() + ":" + std::to_string(i + 1);
    const auto tab = line.find('\t');
    require(tab != std::string::npos && tab > 0, ErrorKind::kParse,
            where + ": expected label<TAB>text");
    LabelledText item;
    item.label = line.substr(0, tab);
    item.text = decode_lossy(std::string_view(line).substr(tab + 1));
    item.tokens = tokenize(item.text);
    require(!item.tokens.empty(), ErrorKind::kParse,
            where + ": text has no tokens");
    out.push_back(std::move(item));
  }
  require(!out.empty(), ErrorKind::kParse, path.string() + ": no examples");
  return out;
}

inline Dataset read_canonical(const std::filesystem::path& path,
                              std::string name) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) {
    return assemble_dataset(std::move(name), read_canonical_file(path));
  }
  const auto train = read_canonical_file(path / "train.tsv");
  std::vector<LabelledText> test, extra;
  if (fs::exists(path / "test.tsv")) test = read_canonical_file(path / "test.tsv");
  if (fs::exists(path / "phrases.tsv")) {
    extra = read_canonical_file(path / "phrases.tsv");
  }
  return assemble_dataset(std::move(name), train, test, extra);
}

inline void write_canonical_file(const std::filesystem::path& path,
                                 const Dataset& ds,
                                 const std::vector<Example>& examples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo,
          "cannot write " + path.string());
  for (const auto& ex : examples) {
    out << ds.label_names[ex.label] << '\t';
    for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
      if (i) out << ' ';
      out << ds.vocab.token_of(ex.tokens[i]);
    }
    out << '\n';
  }
  require(static_cast<bool>(out), ErrorKind::kIo,
          "write failed: " + path.string());
}

/// Writes the dataset directory read back by read_canonical. Text is the
/// token sequence joined by single spaces.
inline void write_canonical(const Dataset& ds,
                            const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_canonical_file(dir / "train.tsv", ds, ds.examples);
  if (!ds.test.empty()) write_canonical_file(dir / "test.tsv", ds, ds.test);
  if (!ds.extra_train.empty()) {
    write_canonical_file(dir / "phrases.tsv", ds, ds.extra_train);
  }
}

}  // namespace wordcnn::text
