#include "cbstream/select/mdi_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cbstream/core/random.hpp"

namespace cbstream::select {
namespace {

struct Counts {
  double w[kNumClasses] = {0.0, 0.0};
  double total() const { return w[0] + w[1]; }
  double gini() const {
    const double t = total();
    if (t <= 0.0) return 0.0;
    const double p = w[1] / t;
    return 2.0 * p * (1.0 - p);
  }
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& rows, const std::vector<Label>& labels, std::size_t n_features,
              const MdiForestParams& params, Rng& rng)
      : rows_(rows), labels_(labels), n_features_(n_features), params_(params), rng_(rng),
        importance_(n_features, 0.0) {
    max_features_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features))));
  }

  // `items` holds (row, weight) pairs; bootstrap duplicates become weights.
  void build(std::vector<std::pair<std::size_t, double>> items, int depth) {
    Counts node;
    for (const auto& [r, w] : items) node.w[index_of(labels_[r])] += w;
    const double impurity = node.gini();
    if (impurity <= 0.0 || node.total() < params_.min_samples_split) return;
    if (params_.max_depth && depth >= *params_.max_depth) return;

    std::vector<std::size_t> order(n_features_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng_.index(i)]);

    double best_gain = 0.0;
    std::size_t best_feature = n_features_;
    double best_threshold = 0.0;
    std::size_t visited = 0;
    std::vector<std::pair<double, std::size_t>> sorted(items.size());
    for (std::size_t f : order) {
      if (visited >= max_features_ && best_feature < n_features_) break;
      for (std::size_t i = 0; i < items.size(); ++i) sorted[i] = {rows_[items[i].first][f], i};
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front().first == sorted.back().first) continue;  // constant here: does not count
      ++visited;
      Counts left;
      Counts right = node;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto& [r, w] = items[sorted[i].second];
        const auto c = index_of(labels_[r]);
        left.w[c] += w;
        right.w[c] -= w;
        if (sorted[i].first == sorted[i + 1].first) continue;
        const double gain = node.total() * impurity - left.total() * left.gini() - right.total() * right.gini();
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = sorted[i].first + (sorted[i + 1].first - sorted[i].first) / 2.0;
        }
      }
    }
    if (best_feature == n_features_) return;

    importance_[best_feature] += best_gain;
    std::vector<std::pair<std::size_t, double>> left_items, right_items;
    for (const auto& item : items)
      (rows_[item.first][best_feature] <= best_threshold ? left_items : right_items).push_back(item);
    items.clear();
    items.shrink_to_fit();
    build(std::move(left_items), depth + 1);
    build(std::move(right_items), depth + 1);
  }

  const std::vector<double>& importance() const { return importance_; }

 private:
  const std::vector<std::vector<double>>& rows_;
  const std::vector<Label>& labels_;
  std::size_t n_features_;
  const MdiForestParams& params_;
  Rng& rng_;
  std::size_t max_features_;
  std::vector<double> importance_;
};

}  // namespace

std::vector<double> mdi_importances(const std::vector<std::vector<double>>& rows, const std::vector<Label>& labels,
                                    std::size_t n_features, const MdiForestParams& params) {
  if (rows.size() != labels.size()) throw std::invalid_argument("mdi_importances: rows and labels differ in length");
  const bool has_absent = std::find(labels.begin(), labels.end(), Label::absent) != labels.end();
  const bool has_present = std::find(labels.begin(), labels.end(), Label::present) != labels.end();
  if (!has_absent || !has_present) throw std::invalid_argument("cold start requires both classes");
  for (const auto& r : rows)
    if (r.size() != n_features) throw std::invalid_argument("mdi_importances: row width mismatch");

  std::vector<double> total(n_features, 0.0);
  const auto n = rows.size();
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(t)));
    std::vector<double> weight(n, params.bootstrap ? 0.0 : 1.0);
    if (params.bootstrap)
      for (std::size_t i = 0; i < n; ++i) weight[rng.index(n)] += 1.0;
    std::vector<std::pair<std::size_t, double>> items;
    for (std::size_t i = 0; i < n; ++i)
      if (weight[i] > 0.0) items.emplace_back(i, weight[i]);
    TreeBuilder builder(rows, labels, n_features, params, rng);
    builder.build(std::move(items), 0);
    const auto& imp = builder.importance();
    const double sum = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (sum <= 0.0) continue;  // a single-leaf tree contributes nothing
    for (std::size_t f = 0; f < n_features; ++f) total[f] += imp[f] / sum;
  }
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  if (sum > 0.0)
    for (auto& v : total) v /= sum;
  return total;
}

std::map<std::string, double, std::less<>> mdi_importances(const FeatureSpace& space,
                                                           const std::vector<FeatureVector>& samples,
                                                           const std::vector<Label>& labels,
                                                           const MdiForestParams& params) {
  std::vector<std::vector<double>> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    std::vector<double> row(space.size(), 0.0);
    for (const auto& [name, value] : s)
      if (auto i = space.find(name)) row[*i] = value;
    rows.push_back(std::move(row));
  }
  const auto imp = mdi_importances(rows, labels, space.size(), params);
  std::map<std::string, double, std::less<>> out;
  for (std::size_t i = 0; i < space.size(); ++i) out[space.name(i)] = imp[i];
  return out;
}

}  // namespace cbstream::select
