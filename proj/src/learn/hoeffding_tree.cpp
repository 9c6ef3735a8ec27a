#include "cbstream/learn/hoeffding_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cbstream::learn {

struct HoeffdingTree::Node {
  int depth = 0;
  std::array<double, kNumClasses> counts{};
  std::optional<Adwin> error;

  bool leaf = true;
  // Leaf state.
  bool active = true;
  double weight_at_last_eval = 0.0;
  std::vector<std::array<GaussianEstimator, kNumClasses>> observers;  // by feature position
  // Split state.
  std::size_t feature = 0;  // instance position
  double threshold = 0.0;
  std::array<std::unique_ptr<Node>, 2> children;
  std::unique_ptr<Node> alternate;

  double total() const { return counts[0] + counts[1]; }
};

namespace {

using Node = HoeffdingTree::Node;

std::unique_ptr<Node> clone_node(const Node& n) {
  auto c = std::make_unique<Node>();
  c->depth = n.depth;
  c->counts = n.counts;
  c->error = n.error;
  c->leaf = n.leaf;
  c->active = n.active;
  c->weight_at_last_eval = n.weight_at_last_eval;
  c->observers = n.observers;
  c->feature = n.feature;
  c->threshold = n.threshold;
  for (std::size_t i = 0; i < 2; ++i)
    if (n.children[i]) c->children[i] = clone_node(*n.children[i]);
  if (n.alternate) c->alternate = clone_node(*n.alternate);
  return c;
}

double entropy(double a, double b) {
  const double t = a + b;
  if (t <= 0.0) return 0.0;
  double h = 0.0;
  for (double v : {a, b})
    if (v > 0.0) h -= v / t * std::log2(v / t);
  return h;
}

std::size_t route(const Node& node, const Instance& x) {
  if (x.has(node.feature)) return x[node.feature] <= node.threshold ? 0 : 1;
  // Inactive feature: follow the branch that has seen more weight.
  return node.children[1]->total() > node.children[0]->total() ? 1 : 0;
}

const Node& leaf_for(const Node& start, const Instance& x) {
  const Node* n = &start;
  while (!n->leaf) n = n->children[route(*n, x)].get();
  return *n;
}

ClassDistribution laplace(const Node& leaf) {
  return ClassDistribution::from_weights({leaf.counts[0] + 1.0, leaf.counts[1] + 1.0});
}

template <typename F>
void visit(const Node& n, bool include_alternates, F&& f) {
  f(n);
  if (!n.leaf) {
    visit(*n.children[0], include_alternates, f);
    visit(*n.children[1], include_alternates, f);
  }
  if (include_alternates && n.alternate) visit(*n.alternate, include_alternates, f);
}

template <typename F>
void visit_mut(Node& n, F&& f) {
  f(n);
  if (!n.leaf) {
    visit_mut(*n.children[0], f);
    visit_mut(*n.children[1], f);
  }
  if (n.alternate) visit_mut(*n.alternate, f);
}

void save_node(const Node& n, BinaryWriter& out) {
  out.boolean(n.leaf);
  out.u32(static_cast<std::uint32_t>(n.depth));
  out.f64(n.counts[0]);
  out.f64(n.counts[1]);
  out.boolean(n.error.has_value());
  if (n.error) n.error->save(out);
  if (n.leaf) {
    out.boolean(n.active);
    out.f64(n.weight_at_last_eval);
    out.u32(static_cast<std::uint32_t>(n.observers.size()));
    for (const auto& obs : n.observers)
      for (const auto& g : obs) g.save(out);
  } else {
    out.u64(n.feature);
    out.f64(n.threshold);
    save_node(*n.children[0], out);
    save_node(*n.children[1], out);
  }
  out.boolean(n.alternate != nullptr);
  if (n.alternate) save_node(*n.alternate, out);
}

std::unique_ptr<Node> load_node(BinaryReader& in) {
  auto n = std::make_unique<Node>();
  n->leaf = in.boolean();
  n->depth = static_cast<int>(in.u32());
  n->counts[0] = in.f64();
  n->counts[1] = in.f64();
  if (in.boolean()) n->error = Adwin::load(in);
  if (n->leaf) {
    n->active = in.boolean();
    n->weight_at_last_eval = in.f64();
    n->observers.resize(in.u32());
    for (auto& obs : n->observers)
      for (auto& g : obs) g = GaussianEstimator::load(in);
  } else {
    n->feature = in.u64();
    n->threshold = in.f64();
    n->children[0] = load_node(in);
    n->children[1] = load_node(in);
  }
  if (in.boolean()) n->alternate = load_node(in);
  return n;
}

constexpr std::size_t kObserverBytes = kNumClasses * 5 * sizeof(double);

}  // namespace

void HoeffdingTreeParams::save(BinaryWriter& out) const {
  out.boolean(max_depth.has_value());
  out.i64(max_depth.value_or(0));
  out.f64(tie_threshold);
  out.f64(max_size_mb);
  out.f64(grace_period);
  out.f64(split_confidence);
  out.i64(split_candidates);
  out.f64(min_branch_fraction);
  out.boolean(adaptive);
  out.f64(adwin_delta);
  out.f64(switch_significance);
  out.f64(drift_window_threshold);
}

HoeffdingTreeParams HoeffdingTreeParams::load(BinaryReader& in) {
  HoeffdingTreeParams p;
  const bool has_depth = in.boolean();
  const auto depth = in.i64();
  p.max_depth = has_depth ? std::optional<int>(static_cast<int>(depth)) : std::nullopt;
  p.tie_threshold = in.f64();
  p.max_size_mb = in.f64();
  p.grace_period = in.f64();
  p.split_confidence = in.f64();
  p.split_candidates = static_cast<int>(in.i64());
  p.min_branch_fraction = in.f64();
  p.adaptive = in.boolean();
  p.adwin_delta = in.f64();
  p.switch_significance = in.f64();
  p.drift_window_threshold = in.f64();
  return p;
}

HoeffdingTree::HoeffdingTree(std::size_t n_features, HoeffdingTreeParams params, std::vector<std::size_t> features)
    : n_features_(n_features), params_(params), features_(std::move(features)) {
  if (features_.empty()) {
    features_.resize(n_features_);
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }
  if (!std::is_sorted(features_.begin(), features_.end()))
    throw std::invalid_argument("HoeffdingTree: feature subset must be sorted");
  if (!features_.empty() && features_.back() >= n_features_)
    throw std::invalid_argument("HoeffdingTree: feature subset out of range");
  root_ = make_leaf(0, {});
}

HoeffdingTree::HoeffdingTree(const HoeffdingTree& other)
    : n_features_(other.n_features_), params_(other.params_), features_(other.features_),
      root_(clone_node(*other.root_)) {}

HoeffdingTree& HoeffdingTree::operator=(const HoeffdingTree& other) {
  if (this != &other) {
    n_features_ = other.n_features_;
    params_ = other.params_;
    features_ = other.features_;
    root_ = clone_node(*other.root_);
  }
  return *this;
}

HoeffdingTree::HoeffdingTree(HoeffdingTree&&) noexcept = default;
HoeffdingTree& HoeffdingTree::operator=(HoeffdingTree&&) noexcept = default;
HoeffdingTree::~HoeffdingTree() = default;

std::unique_ptr<Node> HoeffdingTree::make_leaf(int depth, std::array<double, kNumClasses> counts) const {
  auto n = std::make_unique<Node>();
  n->depth = depth;
  n->counts = counts;
  n->weight_at_last_eval = counts[0] + counts[1];
  if (params_.adaptive) n->error.emplace(params_.adwin_delta);
  return n;
}

void HoeffdingTree::learn_one(const Instance& x, Label y, double weight) {
  if (weight <= 0.0) return;
  if (auto replacement = learn_node(*root_, x, y, weight)) root_ = std::move(replacement);
  enforce_size_limit();
}

std::unique_ptr<Node> HoeffdingTree::learn_node(Node& node, const Instance& x, Label y, double w) {
  bool switch_to_alternate = false;
  if (params_.adaptive) {
    const bool wrong = laplace(leaf_for(node, x)).argmax() != y;
    const double before = node.error->estimation();
    const bool change = node.error->update(wrong ? 1.0 : 0.0);
    const bool increased = change && node.error->estimation() > before;
    if (!node.leaf) {
      if (increased && !node.alternate) {
        node.alternate = make_leaf(node.depth, {});
      } else if (node.alternate && static_cast<double>(node.alternate->error->width()) > params_.drift_window_threshold &&
                 static_cast<double>(node.error->width()) > params_.drift_window_threshold) {
        const double old_err = node.error->estimation();
        const double alt_err = node.alternate->error->estimation();
        const double fn = 1.0 / static_cast<double>(node.alternate->error->width()) +
                          1.0 / static_cast<double>(node.error->width());
        const double bound =
            std::sqrt(2.0 * old_err * (1.0 - old_err) * std::log(2.0 / params_.switch_significance) * fn);
        if (bound < old_err - alt_err) {
          switch_to_alternate = true;
        } else if (bound < alt_err - old_err) {
          node.alternate.reset();
        }
      }
    }
  }

  node.counts[index_of(y)] += w;
  if (node.leaf) {
    if (node.active) {
      if (node.observers.empty()) node.observers.resize(features_.size());
      for (std::size_t k = 0; k < features_.size(); ++k) {
        const auto j = features_[k];
        if (x.has(j)) node.observers[k][index_of(y)].update(x[j], w);
      }
      if (node.total() - node.weight_at_last_eval >= params_.grace_period) {
        attempt_split(node);
        node.weight_at_last_eval = node.total();
      }
    }
  } else {
    if (node.alternate) {
      if (auto r = learn_node(*node.alternate, x, y, w)) node.alternate = std::move(r);
    }
    const auto c = route(node, x);
    if (auto r = learn_node(*node.children[c], x, y, w)) node.children[c] = std::move(r);
  }
  if (switch_to_alternate) return std::move(node.alternate);
  return nullptr;
}

void HoeffdingTree::attempt_split(Node& leaf) {
  if (params_.max_depth && leaf.depth >= *params_.max_depth) return;
  if (leaf.counts[0] <= 0.0 || leaf.counts[1] <= 0.0) return;

  struct Candidate {
    double merit;
    std::size_t pos;
    double threshold;
    std::array<double, kNumClasses> left;
    std::array<double, kNumClasses> right;
  };
  std::vector<Candidate> best_per_feature;
  const int k = std::max(1, params_.split_candidates);
  for (std::size_t pos = 0; pos < leaf.observers.size(); ++pos) {
    const auto& obs = leaf.observers[pos];
    const double lo = std::min(obs[0].min, obs[1].min);
    const double hi = std::max(obs[0].max, obs[1].max);
    if (!(hi > lo)) continue;
    std::optional<Candidate> best;
    for (int i = 1; i <= k; ++i) {
      const double t = lo + (hi - lo) * i / (k + 1);
      std::array<double, kNumClasses> left{}, right{};
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        left[c] = obs[c].weight_at_or_below(t);
        right[c] = obs[c].weight - left[c];
      }
      const double wl = left[0] + left[1];
      const double wr = right[0] + right[1];
      const double total = wl + wr;
      if (total <= 0.0) continue;
      if (wl < params_.min_branch_fraction * total || wr < params_.min_branch_fraction * total) continue;
      const double merit = entropy(left[0] + right[0], left[1] + right[1]) - wl / total * entropy(left[0], left[1]) -
                           wr / total * entropy(right[0], right[1]);
      if (!best || merit > best->merit) best = Candidate{merit, pos, t, left, right};
    }
    if (best) best_per_feature.push_back(*best);
  }
  if (best_per_feature.empty()) return;
  // Equal merits resolve to the lowest position, i.e. the lexicographically
  // smallest feature name.
  std::stable_sort(best_per_feature.begin(), best_per_feature.end(),
                   [](const Candidate& a, const Candidate& b) { return a.merit > b.merit; });
  const auto& best = best_per_feature.front();
  const double second = best_per_feature.size() > 1 ? std::max(best_per_feature[1].merit, 0.0) : 0.0;
  const double eps = hoeffding_bound(1.0, params_.split_confidence, leaf.total());
  if (!(best.merit > 0.0 && (best.merit - second > eps || eps < params_.tie_threshold))) return;

  leaf.leaf = false;
  leaf.feature = features_[best.pos];
  leaf.threshold = best.threshold;
  leaf.children[0] = make_leaf(leaf.depth + 1, best.left);
  leaf.children[1] = make_leaf(leaf.depth + 1, best.right);
  leaf.observers.clear();
  leaf.observers.shrink_to_fit();
  if (params_.adaptive) leaf.error.emplace(params_.adwin_delta);
}

std::size_t HoeffdingTree::size_limit_bytes() const {
  if (!std::isfinite(params_.max_size_mb)) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(params_.max_size_mb * 1024.0 * 1024.0);
}

void HoeffdingTree::enforce_size_limit() {
  if (!std::isfinite(params_.max_size_mb)) return;
  const auto limit = size_limit_bytes();
  auto size = serialized_size();
  if (size <= limit) return;
  // Deactivate the least promising leaves (smallest minority weight) first.
  std::vector<Node*> leaves;
  visit_mut(*root_, [&](Node& n) {
    if (n.leaf && n.active) leaves.push_back(&n);
  });
  std::stable_sort(leaves.begin(), leaves.end(), [](const Node* a, const Node* b) {
    return a->total() - std::max(a->counts[0], a->counts[1]) < b->total() - std::max(b->counts[0], b->counts[1]);
  });
  for (Node* n : leaves) {
    if (size <= limit) break;
    size -= n->observers.size() * kObserverBytes;
    n->observers.clear();
    n->observers.shrink_to_fit();
    n->active = false;
  }
  if (size <= limit) return;
  visit_mut(*root_, [](Node& n) { n.alternate.reset(); });
  if ((size = serialized_size()) <= limit) return;
  // Error detectors restart empty; their buckets grow with the stream.
  if (params_.adaptive) {
    visit_mut(*root_, [&](Node& n) { n.error.emplace(params_.adwin_delta); });
    if ((size = serialized_size()) <= limit) return;
  }
  // Collapse the lightest bottom split until the structure fits.
  while (size > limit && !root_->leaf) {
    Node* victim = nullptr;
    visit_mut(*root_, [&](Node& n) {
      if (n.leaf || !n.children[0]->leaf || !n.children[1]->leaf) return;
      if (!victim || n.total() < victim->total()) victim = &n;
    });
    victim->leaf = true;
    victim->active = false;
    victim->children[0].reset();
    victim->children[1].reset();
    victim->observers.clear();
    victim->weight_at_last_eval = victim->total();
    size = serialized_size();
  }
}

ClassDistribution HoeffdingTree::predict_proba(const Instance& x) const { return laplace(leaf_for(*root_, x)); }

std::size_t HoeffdingTree::n_nodes() const {
  std::size_t n = 0;
  visit(*root_, false, [&](const Node&) { ++n; });
  return n;
}

std::size_t HoeffdingTree::n_leaves() const {
  std::size_t n = 0;
  visit(*root_, false, [&](const Node& node) { n += node.leaf ? 1 : 0; });
  return n;
}

std::size_t HoeffdingTree::n_active_leaves() const {
  std::size_t n = 0;
  visit(*root_, true, [&](const Node& node) { n += node.leaf && node.active ? 1 : 0; });
  return n;
}

std::size_t HoeffdingTree::n_alternate_trees() const {
  std::size_t n = 0;
  visit(*root_, true, [&](const Node& node) { n += node.alternate ? 1 : 0; });
  return n;
}

std::size_t HoeffdingTree::depth() const {
  int d = 0;
  visit(*root_, false, [&](const Node& node) { d = std::max(d, node.depth); });
  return static_cast<std::size_t>(d);
}

std::optional<std::size_t> HoeffdingTree::root_split_feature() const {
  if (root_->leaf) return std::nullopt;
  return root_->feature;
}

void HoeffdingTree::save(BinaryWriter& out) const {
  out.str(kind());
  params_.save(out);
  out.u64(n_features_);
  out.u64(features_.size());
  for (auto f : features_) out.u64(f);
  save_node(*root_, out);
}

std::size_t HoeffdingTree::serialized_size() const {
  auto counter = BinaryWriter::counting();
  save(counter);
  return counter.size();
}

HoeffdingTree HoeffdingTree::load(BinaryReader& in) {
  const auto tag = in.str();
  if (tag != "hatc" && tag != "ht") throw SnapshotError("expected a Hoeffding tree snapshot, got " + tag);
  auto params = HoeffdingTreeParams::load(in);
  const auto n_features = in.u64();
  std::vector<std::size_t> features(in.u64());
  for (auto& f : features) f = in.u64();
  HoeffdingTree tree(n_features, params, features);
  tree.root_ = load_node(in);
  return tree;
}

}  // namespace cbstream::learn
