#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "cbstream/core/binary_io.hpp"
#include "cbstream/core/types.hpp"

namespace cbstream::pipeline {

/// Confusion counts with `present` as the positive class.
struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  void add(Label predicted, Label truth);
  std::uint64_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);

  void save(BinaryWriter& out) const;
  static ConfusionCounts load(BinaryReader& in);
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct ClassScores {
  double precision = 0, recall = 0, f1 = 0;
};

/// Derived scores. Undefined ratios (0/0) are 0.
struct StreamMetrics {
  ConfusionCounts counts;
  std::uint64_t samples_seen = 0;
  double accuracy = 0;
  ClassScores absent, present, macro;

  /// Accuracy, precision, recall and F-measure as macro/absent/present triples.
  nlohmann::json to_json() const;
  /// Fixed-width one-line rendering with percentages, e.g. for terminal output.
  std::string to_row(const std::string& title) const;
};

StreamMetrics compute_metrics(const ConfusionCounts& counts);

}  // namespace cbstream::pipeline
