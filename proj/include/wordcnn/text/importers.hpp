#pragma once

// Adapters from the original benchmark distributions to Dataset. Corpora
// without a stable public layout (Irony, Opi, Tweet) are read from the
// canonical TSV directly.

#include <algorithm>
#include <array>
#include <charconv>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wordcnn/error.hpp"
#include "wordcnn/text/dataset.hpp"
#include "wordcnn/text/tokenize.hpp"

namespace wordcnn::text {

inline const std::array<std::string_view, 9>& dataset_names() {
  static const std::array<std::string_view, 9> kNames = {
      "MR", "SST-1", "SST-2", "Subj", "TREC", "Irony", "Opi", "Tweet", "Polite"};
  return kNames;
}

inline bool is_known_dataset(std::string_view name) {
  const auto& names = dataset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

inline std::string known_dataset_list() {
  std::string out;
  for (auto n : dataset_names()) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

namespace detail {

inline std::string where(const std::filesystem::path& p, std::size_t line) {
  return p.string() + ":" + std::to_string(line + 1);
}

// One sentence per line, every line of the file labelled `label`.
inline void read_sentence_file(const std::filesystem::path& path,
                               const std::string& label,
                               std::vector<LabelledText>& out) {
  const auto lines = read_lines(path);
  std::size_t added = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() && i + 1 == lines.size()) break;
    LabelledText item;
    item.label = label;
    item.text = decode_lossy(lines[i]);
    item.tokens = tokenize(item.text);
    require(!item.tokens.empty(), ErrorKind::kParse,
            where(path, i) + ": sentence has no tokens");
    out.push_back(std::move(item));
    ++added;
  }
  require(added > 0, ErrorKind::kParse, path.string() + ": empty file");
}

}  // namespace detail

/// MR: `rt-polarity.neg` and `rt-polarity.pos`, one review sentence per line.
inline Dataset import_mr(const std::filesystem::path& dir) {
  std::vector<LabelledText> items;
  detail::read_sentence_file(dir / "rt-polarity.neg", "neg", items);
  detail::read_sentence_file(dir / "rt-polarity.pos", "pos", items);
  return assemble_dataset("MR", items);
}

/// Subj: `quote.tok.gt9.5000` (subjective) and `plot.tok.gt9.5000`
/// (objective).
inline Dataset import_subj(const std::filesystem::path& dir) {
  std::vector<LabelledText> items;
  detail::read_sentence_file(dir / "plot.tok.gt9.5000", "objective", items);
  detail::read_sentence_file(dir / "quote.tok.gt9.5000", "subjective", items);
  return assemble_dataset("Subj", items);
}

inline const std::array<std::string_view, 6>& trec_coarse_labels() {
  static const std::array<std::string_view, 6> kLabels = {
      "ABBR", "DESC", "ENTY", "HUM", "LOC", "NUM"};
  return kLabels;
}

/// Parses one TREC question file (`COARSE:fine question text` per line).
inline std::vector<LabelledText> read_trec_file(
    const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<LabelledText> out;
  const auto& coarse = trec_coarse_labels();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() && i + 1 == lines.size()) break;
    const auto space = line.find(' ');
    const std::string head = line.substr(0, space);
    const auto colon = head.find(':');
    require(colon != std::string::npos, ErrorKind::kParse,
            detail::where(path, i) + ": expected COARSE:fine prefix");
    LabelledText item;
    item.label = head.substr(0, colon);
    require(std::find(coarse.begin(), coarse.end(), item.label) != coarse.end(),
            ErrorKind::kParse,
            detail::where(path, i) + ": unknown label " + item.label);
    item.text = space == std::string::npos ? "" : decode_lossy(line.substr(space + 1));
    item.tokens = tokenize(item.text);
    require(!item.tokens.empty(), ErrorKind::kParse,
            detail::where(path, i) + ": question has no tokens");
    out.push_back(std::move(item));
  }
  require(!out.empty(), ErrorKind::kParse, path.string() + ": empty file");
  return out;
}

/// TREC: `train_5500.label` for training and the fixed `TREC_10.label`
/// test set.
inline Dataset import_trec(const std::filesystem::path& dir) {
  const auto& coarse = trec_coarse_labels();
  return assemble_dataset("TREC", read_trec_file(dir / "train_5500.label"),
                          read_trec_file(dir / "TREC_10.label"), {},
                          std::vector<std::string>(coarse.begin(), coarse.end()));
}

/// Five-way sentiment bucket of a treebank score in [0, 1].
inline int sst_fine_bucket(double score) {
  if (score <= 0.2) return 0;
  if (score <= 0.4) return 1;
  if (score <= 0.6) return 2;
  if (score <= 0.8) return 3;
  return 4;
}

namespace detail {

inline std::string replace_all(std::string s, std::string_view from,
                               std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

// datasetSentences.txt is UTF-8 that was encoded twice; undo one layer when
// every code point fits in a byte and the result is still valid UTF-8.
inline std::string undo_double_utf8(const std::string& s) {
  if (!is_valid_utf8(s)) return s;
  std::string bytes;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      bytes.push_back(s[i]);
      ++i;
    } else if ((c & 0xE0) == 0xC0 && i + 1 < s.size()) {
      const unsigned cp = ((c & 0x1F) << 6) |
                          (static_cast<unsigned char>(s[i + 1]) & 0x3F);
      if (cp > 0xFF) return s;
      bytes.push_back(static_cast<char>(cp));
      i += 2;
    } else {
      return s;
    }
  }
  return is_valid_utf8(bytes) ? bytes : s;
}

inline std::string sst_normalize(const std::string& raw) {
  std::string s = replace_all(raw, "-LRB-", "(");
  s = replace_all(s, "-RRB-", ")");
  return undo_double_utf8(s);
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorKind::kParse,
          where + ": bad number '" + s + "'");
  return v;
}

inline long long parse_int(const std::string& s, const std::string& where) {
  long long v = 0;
  require(detail::parse_integer(s, v), ErrorKind::kParse,
          where + ": bad integer '" + s + "'");
  return v;
}

}  // namespace detail

/// Stanford Sentiment Treebank from its release tables
/// (datasetSentences.txt, datasetSplit.txt, dictionary.txt,
/// sentiment_labels.txt). `binary` selects the two-class variant with
/// neutral items dropped. Train and dev sentences form the training side;
/// every dictionary phrase that occurs inside a training sentence is added
/// as a training-only example.
inline Dataset import_sst(const std::filesystem::path& dir, bool binary) {
  const auto sentences_path = dir / "datasetSentences.txt";
  const auto split_path = dir / "datasetSplit.txt";
  const auto dict_path = dir / "dictionary.txt";
  const auto labels_path = dir / "sentiment_labels.txt";

  std::unordered_map<long long, double> phrase_score;
  {
    const auto lines = read_lines(labels_path);
    require(lines.size() > 1, ErrorKind::kParse, labels_path.string() + ": empty file");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto bar = lines[i].find('|');
      require(bar != std::string::npos, ErrorKind::kParse,
              detail::where(labels_path, i) + ": expected id|score");
      const auto w = detail::where(labels_path, i);
      phrase_score[detail::parse_int(lines[i].substr(0, bar), w)] =
          detail::parse_double(lines[i].substr(bar + 1), w);
    }
  }

  // Raw phrase text -> id, and tokenized phrase -> id for fallback matching.
  std::unordered_map<std::string, long long> phrase_id;
  std::unordered_map<std::string, long long> token_phrase_id;
  {
    const auto lines = read_lines(dict_path);
    require(!lines.empty(), ErrorKind::kParse, dict_path.string() + ": empty file");
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto bar = lines[i].rfind('|');
      require(bar != std::string::npos, ErrorKind::kParse,
              detail::where(dict_path, i) + ": expected phrase|id");
      const std::string phrase = lines[i].substr(0, bar);
      const long long id =
          detail::parse_int(lines[i].substr(bar + 1), detail::where(dict_path, i));
      phrase_id.emplace(phrase, id);
      const auto tokens = tokenize(decode_lossy(phrase));
      if (!tokens.empty()) token_phrase_id.emplace(join(tokens), id);
    }
  }

  std::unordered_map<long long, int> split_of;
  {
    const auto lines = read_lines(split_path);
    require(lines.size() > 1, ErrorKind::kParse, split_path.string() + ": empty file");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto comma = lines[i].find(',');
      require(comma != std::string::npos, ErrorKind::kParse,
              detail::where(split_path, i) + ": expected index,split");
      const auto w = detail::where(split_path, i);
      split_of[detail::parse_int(lines[i].substr(0, comma), w)] =
          static_cast<int>(detail::parse_int(lines[i].substr(comma + 1), w));
    }
  }

  auto label_for = [&](double score) -> std::string {
    const int bucket = sst_fine_bucket(score);
    if (!binary) return std::to_string(bucket);
    if (bucket == 2) return {};
    return bucket < 2 ? "0" : "1";
  };

  std::vector<LabelledText> train, test;
  std::unordered_set<long long> sentence_phrases;
  {
    const auto lines = read_lines(sentences_path);
    require(lines.size() > 1, ErrorKind::kParse,
            sentences_path.string() + ": empty file");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto w = detail::where(sentences_path, i);
      const auto tab = lines[i].find('\t');
      require(tab != std::string::npos, ErrorKind::kParse,
              w + ": expected index<TAB>sentence");
      const long long index = detail::parse_int(lines[i].substr(0, tab), w);
      const std::string text = detail::sst_normalize(lines[i].substr(tab + 1));
      LabelledText item;
      item.text = decode_lossy(text);
      item.tokens = tokenize(item.text);
      require(!item.tokens.empty(), ErrorKind::kParse, w + ": sentence has no tokens");

      long long id = -1;
      if (auto it = phrase_id.find(text); it != phrase_id.end()) {
        id = it->second;
      } else if (auto jt = token_phrase_id.find(join(item.tokens));
                 jt != token_phrase_id.end()) {
        id = jt->second;
      }
      require(id >= 0, ErrorKind::kParse, w + ": sentence not in dictionary");
      auto score = phrase_score.find(id);
      require(score != phrase_score.end(), ErrorKind::kParse,
              w + ": phrase id has no sentiment label");
      auto split = split_of.find(index);
      require(split != split_of.end(), ErrorKind::kParse,
              w + ": sentence missing from split table");
      sentence_phrases.insert(id);
      item.label = label_for(score->second);
      if (item.label.empty()) continue;
      (split->second == 2 ? test : train).push_back(std::move(item));
    }
  }

  // Phrases occurring inside training sentences (every span of 1..len-1
  // tokens that the dictionary knows).
  std::vector<LabelledText> phrases;
  std::unordered_set<long long> seen;
  for (const auto& sentence : train) {
    const auto& toks = sentence.tokens;
    for (std::size_t b = 0; b < toks.size(); ++b) {
      std::string key;
      for (std::size_t e = b; e < toks.size(); ++e) {
        if (e > b) key.push_back(' ');
        key += toks[e];
        if (b == 0 && e + 1 == toks.size()) break;
        auto it = token_phrase_id.find(key);
        if (it == token_phrase_id.end()) continue;
        if (sentence_phrases.count(it->second) || !seen.insert(it->second).second) {
          continue;
        }
        auto score = phrase_score.find(it->second);
        if (score == phrase_score.end()) continue;
        LabelledText item;
        item.label = label_for(score->second);
        if (item.label.empty()) continue;
        item.tokens.assign(toks.begin() + b, toks.begin() + e + 1);
        item.text = key;
        phrases.push_back(std::move(item));
      }
    }
  }

  return assemble_dataset(binary ? "SST-2" : "SST-1", train, test, phrases,
                          binary ? std::vector<std::string>{"0", "1"}
                                 : std::vector<std::string>{"0", "1", "2", "3", "4"});
}

/// Polite: `score<TAB>text` per line, binarized at the median score; ties
/// go to the polite class.
inline Dataset import_polite(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<std::pair<double, LabelledText>> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() && i + 1 == lines.size()) break;
    const auto w = detail::where(path, i);
    const auto tab = lines[i].find('\t');
    require(tab != std::string::npos, ErrorKind::kParse, w + ": expected score<TAB>text");
    LabelledText item;
    item.text = decode_lossy(lines[i].substr(tab + 1));
    item.tokens = tokenize(item.text);
    require(!item.tokens.empty(), ErrorKind::kParse, w + ": text has no tokens");
    rows.emplace_back(detail::parse_double(lines[i].substr(0, tab), w), std::move(item));
  }
  require(!rows.empty(), ErrorKind::kParse, path.string() + ": empty file");
  std::vector<double> scores;
  for (const auto& r : rows) scores.push_back(r.first);
  std::sort(scores.begin(), scores.end());
  const std::size_t m = scores.size();
  const double median =
      m % 2 ? scores[m / 2] : 0.5 * (scores[m / 2 - 1] + scores[m / 2]);
  std::vector<LabelledText> items;
  for (auto& [score, item] : rows) {
    item.label = score >= median ? "polite" : "impolite";
    items.push_back(std::move(item));
  }
  return assemble_dataset("Polite", items);
}

/// Imports `name` from `source`. MR/Subj/TREC/SST-* read the original
/// release directory, Polite a scored TSV, and the rest canonical TSV (a
/// file, or a directory with train.tsv and optional test.tsv).
inline Dataset import_dataset(std::string_view name,
                              const std::filesystem::path& source) {
  if (name == "MR") return import_mr(source);
  if (name == "Subj") return import_subj(source);
  if (name == "TREC") return import_trec(source);
  if (name == "SST-1") return import_sst(source, false);
  if (name == "SST-2") return import_sst(source, true);
  if (name == "Polite" && std::filesystem::is_regular_file(source)) {
    return import_polite(source);
  }
  if (is_known_dataset(name)) return read_canonical(source, std::string(name));
  fail(ErrorKind::kConfig, "unknown dataset '" + std::string(name) +
                               "'; valid names: " + known_dataset_list());
}

}  // namespace wordcnn::text
