#pragma once

#include <array>
#include <vector>

#include "cbstream/learn/classifier.hpp"
#include "cbstream/learn/gaussian.hpp"

namespace cbstream::learn {

/// Gaussian Naive Bayes with per-(class, feature) running statistics.
class GaussianNaiveBayes final : public Classifier {
 public:
  explicit GaussianNaiveBayes(std::size_t n_features);

  void learn_one(const Instance& x, Label y, double weight = 1.0) override;
  /// Uniform until both classes have been seen. Features are used only when
  /// active and observed under both classes.
  ClassDistribution predict_proba(const Instance& x) const override;

  std::string_view kind() const override { return "gnb"; }
  std::unique_ptr<Classifier> clone() const override { return std::make_unique<GaussianNaiveBayes>(*this); }
  void save(BinaryWriter& out) const override;
  static GaussianNaiveBayes load(BinaryReader& in);

  std::size_t n_features() const { return stats_[0].size(); }
  double class_weight(Label y) const { return class_weight_[index_of(y)]; }
  const GaussianEstimator& stats(Label y, std::size_t feature) const { return stats_[index_of(y)][feature]; }

 private:
  std::array<double, kNumClasses> class_weight_{};
  std::array<std::vector<GaussianEstimator>, kNumClasses> stats_;
};

}  // namespace cbstream::learn
