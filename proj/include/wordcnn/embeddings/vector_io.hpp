#pragma once

// Binary word-vector files: an ASCII header "<count> <dim>\n", then per word
// the word bytes, one space, dim little-endian float32 values and an
// optional "\n" (always written, tolerated when missing on read).

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

#include "wordcnn/embeddings/word_vectors.hpp"
#include "wordcnn/error.hpp"

namespace wordcnn::embeddings {

struct VectorReadOptions {
  /// Only words in this set are materialized.
  const std::unordered_set<std::string>* filter = nullptr;
  /// Stop after this many records (0 reads all).
  std::size_t max_words = 0;
};

struct VectorReadStats {
  std::size_t records_scanned = 0;
  std::size_t rows_materialized = 0;
  std::uint64_t payload_bytes_read = 0;
};

namespace detail {

inline float float_from_le(const unsigned char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  return std::bit_cast<float>(bits);
}

inline void float_to_le(float v, unsigned char* p) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  std::memcpy(p, &bits, 4);
}

[[noreturn]] inline void format_error(const std::filesystem::path& path,
                                      std::uint64_t offset,
                                      const std::string& what) {
  fail(ErrorKind::kFormat, path.string() + ": byte " + std::to_string(offset) +
                               ": " + what);
}

inline std::uint64_t parse_header_number(const std::string& s,
                                         const std::filesystem::path& path) {
  if (s.empty() || s.size() > 19) format_error(path, 0, "malformed header");
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') format_error(path, 0, "malformed header");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

struct Header {
  std::uint64_t count = 0;
  std::uint64_t dim = 0;
  std::uint64_t file_size = 0;
};

inline Header read_header(std::ifstream& in, const std::filesystem::path& path) {
  Header h;
  std::error_code ec;
  h.file_size = std::filesystem::file_size(path, ec);
  std::string header;
  if (!std::getline(in, header)) format_error(path, 0, "missing header");
  while (!header.empty() && (header.back() == ' ' || header.back() == '\r')) {
    header.pop_back();
  }
  const auto space = header.find(' ');
  if (space == std::string::npos) format_error(path, 0, "malformed header");
  h.count = parse_header_number(header.substr(0, space), path);
  h.dim = parse_header_number(header.substr(space + 1), path);
  if (h.dim == 0) format_error(path, 0, "dimension must be positive");
  return h;
}

// Reads the word of the next record, skipping the previous record's LF.
inline std::string read_word(std::ifstream& in, const std::filesystem::path& path,
                             const Header& h, std::size_t record) {
  const auto offset = static_cast<std::uint64_t>(in.tellg());
  std::string word;
  for (;;) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      format_error(path, offset,
                   "truncated: expected " + std::to_string(h.count) +
                       " records, found " + std::to_string(record));
    }
    if (c == ' ') break;
    if (c == '\n' && word.empty()) continue;
    word.push_back(static_cast<char>(c));
  }
  if (word.empty()) format_error(path, offset, "empty word");
  return word;
}

inline void skip_payload(std::ifstream& in, const std::filesystem::path& path,
                         const Header& h, const std::string& word) {
  const auto offset = static_cast<std::uint64_t>(in.tellg());
  if (offset + h.dim * 4 > h.file_size) {
    format_error(path, offset, "truncated vector for '" + word + "'");
  }
  in.seekg(static_cast<std::streamoff>(h.dim * 4), std::ios::cur);
}

}  // namespace detail

/// Reads the words of a vector file without loading any payload.
inline std::unordered_set<std::string> read_vector_vocabulary(
    const std::filesystem::path& path, std::size_t max_words = 0);

inline WordVectors read_vectors_binary(const std::filesystem::path& path,
                                       const VectorReadOptions& options = {},
                                       VectorReadStats* stats = nullptr) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path.string());

  const auto h = detail::read_header(in, path);
  const std::uint64_t dim = h.dim;
  const std::size_t limit =
      options.max_words ? std::min<std::uint64_t>(h.count, options.max_words) : h.count;
  const std::uint64_t row_bytes = dim * 4;
  std::vector<std::string> words;
  std::vector<float> values;
  std::vector<unsigned char> buffer(row_bytes);
  VectorReadStats local;

  for (std::size_t r = 0; r < limit; ++r) {
    std::string word = detail::read_word(in, path, h, r);
    ++local.records_scanned;
    if (options.filter && options.filter->count(word) == 0) {
      detail::skip_payload(in, path, h, word);
      continue;
    }
    const auto payload_offset = static_cast<std::uint64_t>(in.tellg());
    in.read(reinterpret_cast<char*>(buffer.data()),
            static_cast<std::streamsize>(row_bytes));
    if (static_cast<std::uint64_t>(in.gcount()) != row_bytes) {
      detail::format_error(path, payload_offset, "truncated vector for '" + word + "'");
    }
    local.payload_bytes_read += row_bytes;
    for (std::uint64_t i = 0; i < dim; ++i) {
      values.push_back(detail::float_from_le(buffer.data() + 4 * i));
    }
    words.push_back(std::move(word));
    ++local.rows_materialized;
  }
  if (words.empty() && !options.filter) {
    detail::format_error(path, 0, "file holds no vectors");
  }

  Matrix<float> m(words.size(), dim);
  std::copy(values.begin(), values.end(), m.data());
  if (stats) *stats = local;
  return WordVectors(std::move(words), std::move(m));
}

inline std::unordered_set<std::string> read_vector_vocabulary(
    const std::filesystem::path& path, std::size_t max_words) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path.string());
  const auto h = detail::read_header(in, path);
  const std::size_t limit = max_words ? std::min<std::uint64_t>(h.count, max_words) : h.count;
  std::unordered_set<std::string> words;
  words.reserve(limit);
  for (std::size_t r = 0; r < limit; ++r) {
    std::string word = detail::read_word(in, path, h, r);
    detail::skip_payload(in, path, h, word);
    words.insert(std::move(word));
  }
  return words;
}

inline void write_vectors_binary(const WordVectors& vectors,
                                 const std::filesystem::path& path) {
  require(!vectors.empty(), ErrorKind::kInvalidInput,
          "write_vectors_binary: no vectors to write");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  out << vectors.size() << ' ' << vectors.dim() << '\n';
  std::vector<unsigned char> buffer(vectors.dim() * 4);
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    out.write(vectors.word(r).data(), static_cast<std::streamsize>(vectors.word(r).size()));
    out.put(' ');
    const auto row = vectors.vector(r);
    for (std::size_t i = 0; i < row.size(); ++i) {
      detail::float_to_le(row[i], buffer.data() + 4 * i);
    }
    out.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size()));
    out.put('\n');
  }
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace wordcnn::embeddings
