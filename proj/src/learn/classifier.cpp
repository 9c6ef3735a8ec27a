#include "cbstream/learn/classifier.hpp"

#include <cmath>

#include "cbstream/learn/adaptive_random_forest.hpp"
#include "cbstream/learn/gaussian_nb.hpp"
#include "cbstream/learn/hoeffding_tree.hpp"

namespace cbstream::learn {

double hoeffding_bound(double range, double delta, double n) {
  return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * n));
}

std::unique_ptr<Classifier> load_classifier(BinaryReader& in) {
  BinaryReader peek = in;
  const auto tag = peek.str();
  if (tag == "gnb") return std::make_unique<GaussianNaiveBayes>(GaussianNaiveBayes::load(in));
  if (tag == "hatc" || tag == "ht") return std::make_unique<HoeffdingTree>(HoeffdingTree::load(in));
  if (tag == "arfc") return std::make_unique<AdaptiveRandomForest>(AdaptiveRandomForest::load(in));
  throw SnapshotError("unknown classifier tag: " + tag);
}

}  // namespace cbstream::learn
