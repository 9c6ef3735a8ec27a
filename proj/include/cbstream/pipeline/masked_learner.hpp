#pragma once

#include <memory>

#include "cbstream/core/binary_io.hpp"
#include "cbstream/core/types.hpp"
#include "cbstream/learn/classifier.hpp"
#include "cbstream/select/selection.hpp"

namespace cbstream::pipeline {

/// Keeps only the features named in `mask`.
FeatureVector restrict_to(const FeatureVector& x, const select::SelectionMask& mask);

/// The only path from named features to a learner. The model is sized to the
/// cold-start feature set; the current mask marks which of those are active.
/// Any input feature outside the current mask is rejected with
/// std::invalid_argument, so callers must apply restrict_to() first.
class MaskedLearner {
 public:
  MaskedLearner(FeatureSpace space, std::unique_ptr<learn::Classifier> model, const select::SelectionMask& mask);
  MaskedLearner(const MaskedLearner& other);
  MaskedLearner& operator=(const MaskedLearner& other);
  MaskedLearner(MaskedLearner&&) noexcept = default;
  MaskedLearner& operator=(MaskedLearner&&) noexcept = default;

  /// The new mask must be a subset of the learner's feature space.
  void set_mask(const select::SelectionMask& mask);
  const select::SelectionMask& mask() const { return mask_; }
  const FeatureSpace& space() const { return space_; }
  const learn::Classifier& model() const { return *model_; }

  Instance to_instance(const FeatureVector& x) const;
  ClassDistribution predict_proba(const FeatureVector& x) const { return model_->predict_proba(to_instance(x)); }
  void learn_one(const FeatureVector& x, Label y) { model_->learn_one(to_instance(x), y); }

  void save(BinaryWriter& out) const;
  static MaskedLearner load(BinaryReader& in);

 private:
  FeatureSpace space_;
  std::unique_ptr<learn::Classifier> model_;
  select::SelectionMask mask_;
  std::vector<std::uint8_t> active_;
};

}  // namespace cbstream::pipeline
