#include "cbstream/pipeline/masked_learner.hpp"

#include <stdexcept>

namespace cbstream::pipeline {

FeatureVector restrict_to(const FeatureVector& x, const select::SelectionMask& mask) {
  FeatureVector out;
  for (const auto& [name, value] : x)
    if (mask.contains(name)) out.emplace(name, value);
  return out;
}

MaskedLearner::MaskedLearner(FeatureSpace space, std::unique_ptr<learn::Classifier> model,
                             const select::SelectionMask& mask)
    : space_(std::move(space)), model_(std::move(model)) {
  set_mask(mask);
}

MaskedLearner::MaskedLearner(const MaskedLearner& other)
    : space_(other.space_), model_(other.model_->clone()), mask_(other.mask_), active_(other.active_) {}

MaskedLearner& MaskedLearner::operator=(const MaskedLearner& other) {
  if (this != &other) {
    space_ = other.space_;
    model_ = other.model_->clone();
    mask_ = other.mask_;
    active_ = other.active_;
  }
  return *this;
}

void MaskedLearner::set_mask(const select::SelectionMask& mask) {
  std::vector<std::uint8_t> active(space_.size(), 0);
  for (const auto& name : mask.active) {
    const auto i = space_.find(name);
    if (!i) throw std::invalid_argument("mask feature outside the learner's space: " + name);
    active[*i] = 1;
  }
  mask_ = mask;
  active_ = std::move(active);
}

Instance MaskedLearner::to_instance(const FeatureVector& x) const {
  std::vector<double> values(space_.size(), 0.0);
  for (const auto& [name, value] : x) {
    const auto i = space_.find(name);
    if (!i || !active_[*i]) throw std::invalid_argument("feature outside the selection mask: " + name);
    values[*i] = value;
  }
  return Instance(std::move(values), active_);
}

void MaskedLearner::save(BinaryWriter& out) const {
  out.u64(space_.size());
  for (const auto& n : space_.names()) out.str(n);
  mask_.save(out);
  model_->save(out);
}

MaskedLearner MaskedLearner::load(BinaryReader& in) {
  std::vector<std::string> names(in.u64());
  for (auto& n : names) n = in.str();
  auto mask = select::SelectionMask::load(in);
  auto model = learn::load_classifier(in);
  return MaskedLearner(FeatureSpace(std::move(names)), std::move(model), mask);
}

}  // namespace cbstream::pipeline
