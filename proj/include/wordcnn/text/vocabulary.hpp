#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wordcnn/error.hpp"

namespace wordcnn::text {

using WordId = std::uint32_t;

/// Token <-> id map with corpus counts. Ids are dense; 0 is the padding
/// token and 1 the unknown token, neither of which carries a count.
class Vocabulary {
 public:
  static constexpr WordId kPad = 0;
  static constexpr WordId kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";
  static constexpr std::size_t kReserved = 2;

  Vocabulary() {
    tokens_ = {std::string(kPadToken), std::string(kUnkToken)};
    counts_ = {0, 0};
    index_.emplace(tokens_[0], kPad);
    index_.emplace(tokens_[1], kUnk);
  }

  /// Adds `token` (or bumps its count). Reserved tokens are rejected.
  WordId add(const std::string& token, std::uint64_t count = 1) {
    auto [it, inserted] =
        index_.try_emplace(token, static_cast<WordId>(tokens_.size()));
    if (inserted) {
      tokens_.push_back(token);
      counts_.push_back(0);
    }
    require(it->second >= kReserved, ErrorKind::kInvalidInput,
            "vocabulary: cannot add reserved token " + token);
    counts_[it->second] += count;
    return it->second;
  }

  std::optional<WordId> find(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const std::string& token) const {
    return index_.count(token) != 0;
  }

  /// Id of `token`, or kUnk.
  WordId id_of(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
  }

  const std::string& token_of(WordId id) const {
    require(id < tokens_.size(), ErrorKind::kInvalidInput,
            "vocabulary: id out of range");
    return tokens_[id];
  }

  std::uint64_t count_of(WordId id) const { return counts_.at(id); }

  /// Number of ids including the two reserved ones.
  std::size_t size() const noexcept { return tokens_.size(); }

  /// Number of real words (|V| in dataset statistics).
  std::size_t word_count() const noexcept { return tokens_.size() - kReserved; }

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  std::vector<WordId> encode(const std::vector<std::string>& tokens) const {
    std::vector<WordId> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id_of(t));
    return ids;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId> index_;
};

/// Builds a vocabulary from tokenized sentences. Words with count below
/// `min_count` are left out (they encode to kUnk). Ids are assigned by
/// descending count, ties broken by byte order, so the result does not
/// depend on sentence order.
template <typename Sentences>
Vocabulary build_vocab(const Sentences& sentences, std::uint64_t min_count = 1) {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;
  for (const auto& sentence : sentences) {
    for (const auto& token : sentence) {
      if (token == Vocabulary::kPadToken || token == Vocabulary::kUnkToken) {
        continue;
      }
      ++counts[token];
      ++total;
    }
  }
  require(total > 0, ErrorKind::kInvalidInput, "build_vocab: empty corpus");

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [token, count] : counts) {
    if (count >= min_count) kept.emplace_back(token, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocabulary vocab;
  for (auto& [token, count] : kept) vocab.add(token, count);
  return vocab;
}

}  // namespace wordcnn::text
