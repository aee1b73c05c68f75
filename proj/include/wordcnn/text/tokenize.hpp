#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wordcnn::text {

/// True when `bytes` is well-formed UTF-8 (no overlongs, no surrogates).
inline bool is_valid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr std::array<std::uint32_t, 5> kMin = {0, 0, 0x80, 0x800,
                                                          0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

/// Returns `bytes` unchanged if it is valid UTF-8, otherwise reinterprets
/// every byte as a Latin-1 code point. The MR and Subj releases use a
/// single-byte legacy encoding, which this recovers without loss.
inline std::string decode_lossy(std::string_view bytes) {
  if (is_valid_utf8(bytes)) return std::string(bytes);
  std::string out;
  out.reserve(bytes.size() + bytes.size() / 4);
  for (char ch : bytes) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80) {
      out.push_back(ch);
    } else {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

namespace detail {

inline bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

inline bool is_standalone_punct(char c) {
  switch (c) {
    case ',': case '!': case '?': case '(': case ')': case '"':
      return true;
    default:
      return false;
  }
}

inline bool is_clitic_suffix(std::string_view piece) {
  return piece == "s" || piece == "ve" || piece == "re" || piece == "d" ||
         piece == "ll";
}

// Splits one run of [a-z0-9'] into tokens: `'s 've 're 'd 'll` and `n't`
// become their own tokens, any other apostrophe stands alone.
inline void split_word(std::string_view word, std::vector<std::string>& out) {
  std::vector<std::string_view> pieces;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= word.size(); ++i) {
    if (i == word.size() || word[i] == '\'') {
      pieces.push_back(word.substr(start, i - start));
      start = i + 1;
    }
  }
  // pieces.size() - 1 apostrophes sit between consecutive pieces.
  std::string pending(pieces[0]);
  for (std::size_t a = 1; a < pieces.size(); ++a) {
    const std::string_view next = pieces[a];
    if (is_clitic_suffix(next)) {
      if (!pending.empty()) out.push_back(std::move(pending));
      out.push_back("'" + std::string(next));
      pending.clear();
    } else if (next == "t" && !pending.empty() && pending.back() == 'n') {
      pending.pop_back();
      if (!pending.empty()) out.push_back(std::move(pending));
      out.push_back("n't");
      pending.clear();
    } else {
      if (!pending.empty()) out.push_back(std::move(pending));
      out.push_back("'");
      pending = std::string(next);
    }
  }
  if (!pending.empty()) out.push_back(std::move(pending));
}

}  // namespace detail

/// Sentence tokenizer shared by every dataset. Lowercases (unless
/// `preserve_case`), isolates `, ! ? ( ) "`, splits English clitics, and
/// turns every other non-alphanumeric byte into whitespace.
inline std::vector<std::string> tokenize(std::string_view text,
                                         bool preserve_case = false) {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) {
      detail::split_word(word, tokens);
      word.clear();
    }
  };
  for (char c : text) {
    if (detail::is_ascii_alnum(c)) {
      if (!preserve_case && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      word.push_back(c);
    } else if (c == '\'') {
      word.push_back(c);
    } else if (detail::is_standalone_punct(c)) {
      flush();
      tokens.emplace_back(1, c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

inline std::string join(const std::vector<std::string>& tokens,
                        char sep = ' ') {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(sep);
    out += tokens[i];
  }
  return out;
}

}  // namespace wordcnn::text
