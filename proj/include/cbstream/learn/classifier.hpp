#pragma once

#include <memory>
#include <string_view>

#include "cbstream/core/binary_io.hpp"
#include "cbstream/core/types.hpp"

namespace cbstream::learn {

/// Single-writer incremental classifier. predict_proba never mutates.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual void learn_one(const Instance& x, Label y, double weight = 1.0) = 0;
  virtual ClassDistribution predict_proba(const Instance& x) const = 0;

  virtual std::string_view kind() const = 0;
  virtual std::unique_ptr<Classifier> clone() const = 0;
  /// Writes a tagged snapshot that load_classifier() restores bit-exactly.
  virtual void save(BinaryWriter& out) const = 0;
};

std::unique_ptr<Classifier> load_classifier(BinaryReader& in);

/// Hoeffding bound: sqrt(R^2 ln(1/delta) / (2n)).
double hoeffding_bound(double range, double delta, double n);

}  // namespace cbstream::learn
