#include "cbstream/learn/adaptive_random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cbstream::learn {

std::size_t FeatureBudget::resolve(std::size_t n_features) const {
  std::size_t k = n_features;
  switch (kind_) {
    case Kind::sqrt: k = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n_features)))); break;
    case Kind::count: k = count_ > 0 ? static_cast<std::size_t>(count_) : 1; break;
    case Kind::all: break;
  }
  return std::clamp<std::size_t>(k, std::min<std::size_t>(1, n_features), n_features);
}

std::string FeatureBudget::describe() const {
  switch (kind_) {
    case Kind::sqrt: return "sqrt";
    case Kind::all: return "all";
    case Kind::count: break;
  }
  return std::to_string(count_);
}

ArfParams::ArfParams() : max_features(FeatureBudget::count(25)) {
  tree.adaptive = false;
  tree.max_depth = std::nullopt;
  tree.max_size_mb = std::numeric_limits<double>::infinity();
}

bool operator==(const ArfParams& a, const ArfParams& b) {
  return a.n_models == b.n_models && a.max_features == b.max_features && a.lambda == b.lambda &&
         a.bootstrap == b.bootstrap && a.detectors == b.detectors && a.warning_delta == b.warning_delta &&
         a.drift_delta == b.drift_delta && a.tree == b.tree;
}

void ArfParams::save(BinaryWriter& out) const {
  out.i64(n_models);
  out.u8(static_cast<std::uint8_t>(max_features.kind()));
  out.i64(max_features.value());
  out.f64(lambda);
  out.boolean(bootstrap);
  out.boolean(detectors);
  out.f64(warning_delta);
  out.f64(drift_delta);
  tree.save(out);
}

ArfParams ArfParams::load(BinaryReader& in) {
  ArfParams p;
  p.n_models = static_cast<int>(in.i64());
  const auto kind = static_cast<FeatureBudget::Kind>(in.u8());
  const auto count = static_cast<int>(in.i64());
  p.max_features = kind == FeatureBudget::Kind::sqrt  ? FeatureBudget::sqrt()
                   : kind == FeatureBudget::Kind::all ? FeatureBudget::all()
                                                      : FeatureBudget::count(count);
  p.lambda = in.f64();
  p.bootstrap = in.boolean();
  p.detectors = in.boolean();
  p.warning_delta = in.f64();
  p.drift_delta = in.f64();
  p.tree = HoeffdingTreeParams::load(in);
  return p;
}

AdaptiveRandomForest::AdaptiveRandomForest(std::size_t n_features, ArfParams params, std::uint64_t seed)
    : n_features_(n_features), params_(params), rng_(seed) {
  members_.reserve(static_cast<std::size_t>(std::max(params_.n_models, 0)));
  for (int i = 0; i < params_.n_models; ++i)
    members_.push_back({make_tree(), Adwin(params_.warning_delta), Adwin(params_.drift_delta), std::nullopt});
}

HoeffdingTree AdaptiveRandomForest::make_tree() {
  const auto k = params_.max_features.resolve(n_features_);
  std::vector<std::size_t> pool(n_features_);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  if (k < n_features_) {
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng_.index(n_features_ - i)]);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
  }
  return HoeffdingTree(n_features_, params_.tree, std::move(pool));
}

bool AdaptiveRandomForest::error_increase(Adwin& detector, double error) {
  const double before = detector.estimation();
  return detector.update(error) && detector.estimation() > before;
}

void AdaptiveRandomForest::learn_one(const Instance& x, Label y, double weight) {
  for (auto& m : members_) {
    if (params_.detectors) {
      const double err = m.tree.predict_proba(x).argmax() != y ? 1.0 : 0.0;
      if (error_increase(m.warning, err)) {
        m.background = make_tree();
        m.warning = Adwin(params_.warning_delta);
        ++warnings_;
      }
      if (error_increase(m.drift, err)) {
        m.tree = m.background ? std::move(*m.background) : make_tree();
        m.background.reset();
        m.warning = Adwin(params_.warning_delta);
        m.drift = Adwin(params_.drift_delta);
        ++drifts_;
      }
    }
    const int k = params_.bootstrap ? rng_.poisson(params_.lambda) : 1;
    if (k <= 0) continue;
    m.tree.learn_one(x, y, weight * k);
    if (m.background) m.background->learn_one(x, y, weight * k);
  }
}

ClassDistribution AdaptiveRandomForest::predict_proba(const Instance& x) const {
  if (members_.empty()) return ClassDistribution::uniform();
  std::array<double, kNumClasses> sum{};
  for (const auto& m : members_) {
    const auto p = m.tree.predict_proba(x);
    sum[0] += p[Label::absent];
    sum[1] += p[Label::present];
  }
  return ClassDistribution::from_weights(sum);
}

void AdaptiveRandomForest::save(BinaryWriter& out) const {
  out.str(kind());
  out.u64(n_features_);
  params_.save(out);
  out.str(rng_.state());
  out.u64(warnings_);
  out.u64(drifts_);
  out.u64(members_.size());
  for (const auto& m : members_) {
    m.tree.save(out);
    m.warning.save(out);
    m.drift.save(out);
    out.boolean(m.background.has_value());
    if (m.background) m.background->save(out);
  }
}

AdaptiveRandomForest AdaptiveRandomForest::load(BinaryReader& in) {
  if (in.str() != "arfc") throw SnapshotError("expected an arfc snapshot");
  const auto n_features = in.u64();
  auto params = ArfParams::load(in);
  ArfParams empty = params;
  empty.n_models = 0;
  AdaptiveRandomForest f(n_features, empty, 0);
  f.params_ = params;
  f.rng_.restore(in.str());
  f.warnings_ = in.u64();
  f.drifts_ = in.u64();
  const auto n = in.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    auto tree = HoeffdingTree::load(in);
    auto warning = Adwin::load(in);
    auto drift = Adwin::load(in);
    std::optional<HoeffdingTree> bg;
    if (in.boolean()) bg = HoeffdingTree::load(in);
    f.members_.push_back({std::move(tree), std::move(warning), std::move(drift), std::move(bg)});
  }
  return f;
}

}  // namespace cbstream::learn
