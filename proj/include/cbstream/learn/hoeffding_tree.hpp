#pragma once

#include <array>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "cbstream/learn/adwin.hpp"
#include "cbstream/learn/classifier.hpp"
#include "cbstream/learn/gaussian.hpp"

namespace cbstream::learn {

struct HoeffdingTreeParams {
  std::optional<int> max_depth = 200;  // nullopt: unlimited
  double tie_threshold = 0.005;
  double max_size_mb = 200.0;  // infinity disables the size check
  double grace_period = 200.0;
  double split_confidence = 1e-7;
  int split_candidates = 10;
  double min_branch_fraction = 0.01;

  /// Per-node ADWIN error monitoring with alternate subtrees (HAT). Off for
  /// the plain Hoeffding tree used inside the forest.
  bool adaptive = true;
  double adwin_delta = Adwin::kDefaultDelta;
  double switch_significance = 0.05;
  double drift_window_threshold = 300.0;

  void save(BinaryWriter& out) const;
  static HoeffdingTreeParams load(BinaryReader& in);
  friend bool operator==(const HoeffdingTreeParams&, const HoeffdingTreeParams&) = default;
};

/// Incremental decision tree over numeric features. Leaves keep per-class
/// Gaussian estimators per feature; after each grace period a leaf compares
/// the best two information-gain splits (10 candidate thresholds per feature)
/// against the Hoeffding bound.
class HoeffdingTree final : public Classifier {
 public:
  /// `features` restricts the tree to a subset of instance positions (sorted
  /// ascending); empty means all `n_features`.
  HoeffdingTree(std::size_t n_features, HoeffdingTreeParams params = {}, std::vector<std::size_t> features = {});
  HoeffdingTree(const HoeffdingTree& other);
  HoeffdingTree& operator=(const HoeffdingTree& other);
  HoeffdingTree(HoeffdingTree&&) noexcept;
  HoeffdingTree& operator=(HoeffdingTree&&) noexcept;
  ~HoeffdingTree() override;

  void learn_one(const Instance& x, Label y, double weight = 1.0) override;
  /// Laplace-smoothed class counts of the reached leaf.
  ClassDistribution predict_proba(const Instance& x) const override;

  std::string_view kind() const override { return params_.adaptive ? "hatc" : "ht"; }
  std::unique_ptr<Classifier> clone() const override { return std::make_unique<HoeffdingTree>(*this); }
  void save(BinaryWriter& out) const override;
  static HoeffdingTree load(BinaryReader& in);

  const HoeffdingTreeParams& params() const { return params_; }
  const std::vector<std::size_t>& features() const { return features_; }
  std::size_t n_nodes() const;
  std::size_t n_leaves() const;
  std::size_t n_active_leaves() const;
  std::size_t n_alternate_trees() const;
  std::size_t depth() const;
  /// Instance position tested at the root, if the root has split.
  std::optional<std::size_t> root_split_feature() const;
  /// Exact byte size of save() output.
  std::size_t serialized_size() const;
  std::size_t size_limit_bytes() const;

  struct Node;

 private:
  std::unique_ptr<Node> make_leaf(int depth, std::array<double, kNumClasses> counts) const;
  std::unique_ptr<Node> learn_node(Node& node, const Instance& x, Label y, double w);
  void attempt_split(Node& leaf);
  void enforce_size_limit();

  std::size_t n_features_;
  HoeffdingTreeParams params_;
  std::vector<std::size_t> features_;
  std::unique_ptr<Node> root_;
};

}  // namespace cbstream::learn
