#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wordcnn/error.hpp"
#include "wordcnn/numerics.hpp"

namespace wordcnn::classifier {

enum class Variant { kRand, kStatic, kNonStatic };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kRand: return "rand";
    case Variant::kStatic: return "static";
    case Variant::kNonStatic: return "non-static";
  }
  return "rand";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "rand") return Variant::kRand;
  if (s == "static") return Variant::kStatic;
  if (s == "non-static" || s == "nonstatic") return Variant::kNonStatic;
  fail(ErrorKind::kConfig,
       "unknown variant '" + std::string(s) + "'; valid: rand, static, non-static");
}

inline bool uses_pretrained(Variant v) { return v != Variant::kRand; }

struct CnnConfig {
  std::vector<std::size_t> filter_widths{3, 4, 5};
  std::size_t feature_maps = 100;
  double dropout = 0.5;
  double l2 = 0.15;  // on final-layer weights and bias
  std::size_t batch_size = 50;
  LrSchedule schedule;
  int epochs = 25;
  Variant variant = Variant::kRand;
  std::size_t embedding_dim = 300;
  double unknown_range = 0.5;  // U[-r, r] for words without a pretrained vector
  std::uint64_t seed = 1;

  std::size_t max_width() const {
    return *std::max_element(filter_widths.begin(), filter_widths.end());
  }
  std::size_t penultimate_dim() const { return filter_widths.size() * feature_maps; }

  void validate() const {
    require(!filter_widths.empty(), ErrorKind::kConfig, "cnn: no filter widths");
    for (std::size_t i = 0; i < filter_widths.size(); ++i) {
      require(filter_widths[i] > 0, ErrorKind::kConfig, "cnn: filter width must be positive");
      require(i == 0 || filter_widths[i] > filter_widths[i - 1], ErrorKind::kConfig,
              "cnn: filter widths must be strictly ascending");
    }
    require(feature_maps > 0, ErrorKind::kConfig, "cnn: feature_maps must be positive");
    require(dropout >= 0.0 && dropout < 1.0, ErrorKind::kConfig,
            "cnn: dropout must be in [0, 1)");
    require(l2 >= 0.0, ErrorKind::kConfig, "cnn: l2 must be >= 0");
    require(batch_size > 0, ErrorKind::kConfig, "cnn: batch_size must be positive");
    require(epochs >= 0, ErrorKind::kConfig, "cnn: epochs must be >= 0");
    require(embedding_dim > 0, ErrorKind::kConfig, "cnn: embedding_dim must be positive");
    require(unknown_range >= 0.0, ErrorKind::kConfig, "cnn: unknown_range must be >= 0");
  }
};

/// Epoch counts per variant and dataset used for the published runs.
/// Irony is not listed for the fine-tuned variant; it falls back to 25.
inline int default_epochs(std::string_view dataset, Variant variant) {
  switch (variant) {
    case Variant::kStatic:
      return 25;
    case Variant::kNonStatic:
      if (dataset == "MR" || dataset == "SST-1" || dataset == "SST-2" || dataset == "Subj") {
        return 4;
      }
      if (dataset == "Polite") return 10;
      if (dataset == "Tweet" || dataset == "Opi") return 16;
      return 25;
    case Variant::kRand:
      if (dataset == "Tweet") return 10;
      if (dataset == "MR" || dataset == "SST-1") return 4;
      return 25;
  }
  return 25;
}

}  // namespace wordcnn::classifier
