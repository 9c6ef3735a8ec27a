#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cbstream/core/random.hpp"
#include "cbstream/learn/adwin.hpp"
#include "cbstream/learn/classifier.hpp"
#include "cbstream/learn/hoeffding_tree.hpp"

namespace cbstream::learn {

/// Number of features drawn per member: sqrt(n), a fixed count, or all.
/// Always clamped to [1, n].
class FeatureBudget {
 public:
  enum class Kind : std::uint8_t { sqrt, count, all };

  static FeatureBudget sqrt() { return FeatureBudget(Kind::sqrt, 0); }
  static FeatureBudget count(int n) { return FeatureBudget(Kind::count, n); }
  static FeatureBudget all() { return FeatureBudget(Kind::all, 0); }

  std::size_t resolve(std::size_t n_features) const;
  Kind kind() const { return kind_; }
  int value() const { return count_; }
  std::string describe() const;

  friend bool operator==(const FeatureBudget&, const FeatureBudget&) = default;

 private:
  FeatureBudget(Kind k, int c) : kind_(k), count_(c) {}
  Kind kind_;
  int count_;
};

struct ArfParams {
  /// Defaults: 25 features per member; member trees are plain (non-adaptive)
  /// Hoeffding trees without depth or size limits.
  ArfParams();

  int n_models = 100;
  FeatureBudget max_features;
  double lambda = 25.0;
  /// Off: every member sees weight 1 instead of Poisson(lambda).
  bool bootstrap = true;
  bool detectors = true;
  double warning_delta = 0.01;
  double drift_delta = 0.002;
  HoeffdingTreeParams tree;

  void save(BinaryWriter& out) const;
  static ArfParams load(BinaryReader& in);
  friend bool operator==(const ArfParams& a, const ArfParams& b);
};

/// Adaptive Random Forest: Hoeffding tree members on fixed random feature
/// subsets, online bagging with Poisson weights, and per-member ADWIN
/// warning/drift detectors driving background-tree replacement.
class AdaptiveRandomForest final : public Classifier {
 public:
  AdaptiveRandomForest(std::size_t n_features, ArfParams params, std::uint64_t seed);

  void learn_one(const Instance& x, Label y, double weight = 1.0) override;
  /// Mean of member distributions.
  ClassDistribution predict_proba(const Instance& x) const override;

  std::string_view kind() const override { return "arfc"; }
  std::unique_ptr<Classifier> clone() const override { return std::make_unique<AdaptiveRandomForest>(*this); }
  void save(BinaryWriter& out) const override;
  static AdaptiveRandomForest load(BinaryReader& in);

  const ArfParams& params() const { return params_; }
  std::size_t n_members() const { return members_.size(); }
  const HoeffdingTree& member(std::size_t i) const { return members_[i].tree; }
  bool has_background(std::size_t i) const { return members_[i].background.has_value(); }
  std::uint64_t warnings() const { return warnings_; }
  std::uint64_t drifts() const { return drifts_; }

 private:
  struct Member {
    HoeffdingTree tree;
    Adwin warning;
    Adwin drift;
    std::optional<HoeffdingTree> background;
  };

  HoeffdingTree make_tree();
  static bool error_increase(Adwin& detector, double error);

  std::size_t n_features_;
  ArfParams params_;
  Rng rng_;
  std::vector<Member> members_;
  std::uint64_t warnings_ = 0;
  std::uint64_t drifts_ = 0;
};

}  // namespace cbstream::learn
