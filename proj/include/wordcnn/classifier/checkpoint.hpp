#pragma once

// Model checkpoints. Layout:
//   WORDCNN-CHECKPOINT 1\n
//   key = value\n ...            config echo, dataset name, labels, n
//   \n
//   then one block per tensor:
//   <name>\n<rows> <cols>\n and per row: label, SPACE, cols float32 LE, LF
// The per-row encoding is the binary word-vector convention; for the
// embedding table the row labels are the vocabulary tokens.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wordcnn/classifier/config.hpp"
#include "wordcnn/classifier/model.hpp"
#include "wordcnn/embeddings/vector_io.hpp"
#include "wordcnn/error.hpp"
#include "wordcnn/text/vocabulary.hpp"

namespace wordcnn::classifier {

inline constexpr std::string_view kCheckpointMagic = "WORDCNN-CHECKPOINT";
inline constexpr int kCheckpointVersion = 1;

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Flat key/value form of every CnnConfig field.
inline std::vector<std::pair<std::string, std::string>> config_entries(const CnnConfig& c) {
  std::string widths;
  for (std::size_t i = 0; i < c.filter_widths.size(); ++i) {
    if (i) widths += ',';
    widths += std::to_string(c.filter_widths[i]);
  }
  return {
      {"variant", std::string(to_string(c.variant))},
      {"filter_widths", widths},
      {"feature_maps", std::to_string(c.feature_maps)},
      {"dropout", format_double(c.dropout)},
      {"l2", format_double(c.l2)},
      {"batch_size", std::to_string(c.batch_size)},
      {"epochs", std::to_string(c.epochs)},
      {"embedding_dim", std::to_string(c.embedding_dim)},
      {"unknown_range", format_double(c.unknown_range)},
      {"learning_rate", format_double(c.schedule.base)},
      {"learning_rate_2", format_double(c.schedule.second)},
      {"learning_rate_3", format_double(c.schedule.third)},
      {"lr_boundary_1", std::to_string(c.schedule.first_boundary)},
      {"lr_boundary_2", std::to_string(c.schedule.second_boundary)},
      {"seed", std::to_string(c.seed)},
  };
}

namespace detail {

template <typename N>
N parse_number(const std::string& key, const std::string& value) {
  N out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  require(ec == std::errc() && ptr == value.data() + value.size(), ErrorKind::kConfig,
          "bad value for '" + key + "': " + value);
  return out;
}

}  // namespace detail

/// Applies one key; returns false when the key is not a CnnConfig field.
inline bool apply_config_entry(CnnConfig& c, const std::string& key, const std::string& value) {
  using detail::parse_number;
  if (key == "variant") {
    c.variant = parse_variant(value);
  } else if (key == "filter_widths") {
    c.filter_widths.clear();
    std::stringstream ss(value);
    std::string part;
    while (std::getline(ss, part, ',')) {
      c.filter_widths.push_back(parse_number<std::size_t>(key, part));
    }
  } else if (key == "feature_maps") {
    c.feature_maps = parse_number<std::size_t>(key, value);
  } else if (key == "dropout") {
    c.dropout = parse_number<double>(key, value);
  } else if (key == "l2") {
    c.l2 = parse_number<double>(key, value);
  } else if (key == "batch_size") {
    c.batch_size = parse_number<std::size_t>(key, value);
  } else if (key == "epochs") {
    c.epochs = parse_number<int>(key, value);
  } else if (key == "embedding_dim") {
    c.embedding_dim = parse_number<std::size_t>(key, value);
  } else if (key == "unknown_range") {
    c.unknown_range = parse_number<double>(key, value);
  } else if (key == "learning_rate") {
    c.schedule.base = parse_number<double>(key, value);
  } else if (key == "learning_rate_2") {
    c.schedule.second = parse_number<double>(key, value);
  } else if (key == "learning_rate_3") {
    c.schedule.third = parse_number<double>(key, value);
  } else if (key == "lr_boundary_1") {
    c.schedule.first_boundary = parse_number<int>(key, value);
  } else if (key == "lr_boundary_2") {
    c.schedule.second_boundary = parse_number<int>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else {
    return false;
  }
  return true;
}

struct Checkpoint {
  std::string dataset;
  std::vector<std::string> labels;
  std::size_t max_length = 0;
  CnnConfig config;
  text::Vocabulary vocab;
  CnnModel<float> model;
};

namespace detail {

template <typename T>
void write_block(std::ostream& out, const std::string& name, const Matrix<T>& m,
                 const std::function<std::string(std::size_t)>& label) {
  out << name << '\n' << m.rows() << ' ' << m.cols() << '\n';
  std::vector<unsigned char> buf(m.cols() * 4);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto l = label(r);
    out.write(l.data(), static_cast<std::streamsize>(l.size()));
    out.put(' ');
    const auto row = m.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) {
      embeddings::detail::float_to_le(static_cast<float>(row[i]), buf.data() + 4 * i);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    out.put('\n');
  }
}

struct Block {
  std::string name;
  std::vector<std::string> labels;
  Matrix<float> values;
};

inline Block read_block(std::istream& in, const std::filesystem::path& path) {
  Block b;
  auto bad = [&](const std::string& what) {
    fail(ErrorKind::kFormat, path.string() + ": byte " +
                                 std::to_string(static_cast<long long>(in.tellg())) + ": " + what);
  };
  if (!std::getline(in, b.name) || b.name.empty()) bad("expected tensor name");
  std::string shape;
  if (!std::getline(in, shape)) bad("expected tensor shape");
  std::istringstream ss(shape);
  std::size_t rows = 0, cols = 0;
  if (!(ss >> rows >> cols) || cols == 0) bad("malformed tensor shape for " + b.name);
  b.values = Matrix<float>(rows, cols);
  std::vector<unsigned char> buf(cols * 4);
  for (std::size_t r = 0; r < rows; ++r) {
    std::string label;
    for (;;) {
      const int c = in.get();
      if (c == std::char_traits<char>::eof()) bad("truncated tensor " + b.name);
      if (c == ' ') break;
      label.push_back(static_cast<char>(c));
    }
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) bad("truncated tensor " + b.name);
    for (std::size_t i = 0; i < cols; ++i) {
      b.values(r, i) = embeddings::detail::float_from_le(buf.data() + 4 * i);
    }
    if (in.peek() == '\n') in.get();
    b.labels.push_back(std::move(label));
  }
  return b;
}

}  // namespace detail

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const std::string& dataset,
                     const std::vector<std::string>& labels, std::size_t max_length,
                     const CnnConfig& config, const text::Vocabulary& vocab,
                     const CnnModel<T>& model) {
  require(model.embeddings.rows() == vocab.size(), ErrorKind::kInvalidInput,
          "save_checkpoint: embedding rows do not match vocabulary");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << "dataset = " << dataset << '\n';
  std::string joined;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) joined += '\t';
    joined += labels[i];
  }
  out << "labels = " << joined << '\n';
  out << "max_length = " << max_length << '\n';
  for (const auto& [k, v] : config_entries(config)) out << k << " = " << v << '\n';
  out << '\n';

  auto index_label = [](const std::string& prefix) {
    return [prefix](std::size_t r) { return prefix + std::to_string(r); };
  };
  detail::write_block(out, "embeddings", model.embeddings,
                      [&](std::size_t r) { return vocab.token_of(static_cast<WordId>(r)); });
  for (const auto& bank : model.banks) {
    const auto base = "conv" + std::to_string(bank.width);
    detail::write_block(out, base + ".weights", bank.weights, index_label("filter"));
    detail::write_block(out, base + ".bias", bank.bias, index_label("row"));
  }
  detail::write_block(out, "final.weights", model.final_weights, index_label("class"));
  detail::write_block(out, "final.bias", model.final_bias, index_label("row"));
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  require(line == std::string(kCheckpointMagic) + " " + std::to_string(kCheckpointVersion),
          ErrorKind::kFormat, path.string() + ": not a version-1 checkpoint");
  Checkpoint ck;
  while (std::getline(in, line) && !line.empty()) {
    const auto eq = line.find(" = ");
    require(eq != std::string::npos, ErrorKind::kFormat,
            path.string() + ": malformed header line: " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 3);
    if (key == "dataset") {
      ck.dataset = value;
    } else if (key == "labels") {
      std::stringstream ss(value);
      std::string part;
      while (std::getline(ss, part, '\t')) ck.labels.push_back(part);
    } else if (key == "max_length") {
      ck.max_length = detail::parse_number<std::size_t>(key, value);
    } else {
      require(apply_config_entry(ck.config, key, value), ErrorKind::kFormat,
              path.string() + ": unknown header key " + key);
    }
  }

  auto emb = detail::read_block(in, path);
  require(emb.name == "embeddings" && emb.labels.size() >= text::Vocabulary::kReserved,
          ErrorKind::kFormat, path.string() + ": embeddings block missing");
  for (std::size_t r = text::Vocabulary::kReserved; r < emb.labels.size(); ++r) {
    ck.vocab.add(emb.labels[r]);
  }
  ck.model.embeddings = std::move(emb.values);
  for (auto width : ck.config.filter_widths) {
    const auto base = "conv" + std::to_string(width);
    auto w = detail::read_block(in, path);
    auto b = detail::read_block(in, path);
    require(w.name == base + ".weights" && b.name == base + ".bias", ErrorKind::kFormat,
            path.string() + ": expected " + base + " blocks");
    ck.model.banks.push_back({width, std::move(w.values), std::move(b.values)});
  }
  auto fw = detail::read_block(in, path);
  auto fb = detail::read_block(in, path);
  require(fw.name == "final.weights" && fb.name == "final.bias", ErrorKind::kFormat,
          path.string() + ": final layer blocks missing");
  ck.model.final_weights = std::move(fw.values);
  ck.model.final_bias = std::move(fb.values);
  require(ck.model.final_weights.rows() == ck.labels.size(), ErrorKind::kFormat,
          path.string() + ": label count does not match final layer");
  return ck;
}

}  // namespace wordcnn::classifier
