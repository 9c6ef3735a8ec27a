#include "cbstream/learn/gaussian_nb.hpp"

#include <cmath>

namespace cbstream::learn {

GaussianNaiveBayes::GaussianNaiveBayes(std::size_t n_features) {
  for (auto& s : stats_) s.resize(n_features);
}

void GaussianNaiveBayes::learn_one(const Instance& x, Label y, double weight) {
  if (weight <= 0.0) return;
  const auto c = index_of(y);
  class_weight_[c] += weight;
  for (std::size_t j = 0; j < stats_[c].size(); ++j)
    if (x.has(j)) stats_[c][j].update(x[j], weight);
}

ClassDistribution GaussianNaiveBayes::predict_proba(const Instance& x) const {
  if (class_weight_[0] <= 0.0 || class_weight_[1] <= 0.0) return ClassDistribution::uniform();
  const double total = class_weight_[0] + class_weight_[1];
  std::array<double, kNumClasses> log_p{};
  for (std::size_t c = 0; c < kNumClasses; ++c) log_p[c] = std::log(class_weight_[c] / total);
  for (std::size_t j = 0; j < stats_[0].size(); ++j) {
    if (!x.has(j) || stats_[0][j].weight <= 0.0 || stats_[1][j].weight <= 0.0) continue;
    for (std::size_t c = 0; c < kNumClasses; ++c) log_p[c] += stats_[c][j].log_pdf(x[j]);
  }
  const double m = std::max(log_p[0], log_p[1]);
  return ClassDistribution::from_weights({std::exp(log_p[0] - m), std::exp(log_p[1] - m)});
}

void GaussianNaiveBayes::save(BinaryWriter& out) const {
  out.str(kind());
  out.u64(n_features());
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    out.f64(class_weight_[c]);
    for (const auto& g : stats_[c]) g.save(out);
  }
}

GaussianNaiveBayes GaussianNaiveBayes::load(BinaryReader& in) {
  if (in.str() != "gnb") throw SnapshotError("expected a gnb snapshot");
  GaussianNaiveBayes m(in.u64());
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    m.class_weight_[c] = in.f64();
    for (auto& g : m.stats_[c]) g = GaussianEstimator::load(in);
  }
  return m;
}

}  // namespace cbstream::learn
