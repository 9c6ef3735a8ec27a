#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbstream/core/types.hpp"

namespace cbstream::select {

struct MdiForestParams {
  int n_trees = 100;
  std::optional<int> max_depth;  // unlimited
  int min_samples_split = 2;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

/// Offline random forest of CART trees (Gini impurity, sqrt(p) candidate
/// features per node, midpoint thresholds), used only for its importances.
/// Each tree's impurity decreases are normalized to sum to 1, averaged over
/// trees and renormalized. `rows` are dense samples over `n_features` columns.
std::vector<double> mdi_importances(const std::vector<std::vector<double>>& rows, const std::vector<Label>& labels,
                                    std::size_t n_features, const MdiForestParams& params = {});

/// Named form over a cold-start buffer. Features absent from a vector read as 0.
/// Throws std::invalid_argument("cold start requires both classes") on a
/// single-class buffer and on an empty one.
std::map<std::string, double, std::less<>> mdi_importances(const FeatureSpace& space,
                                                           const std::vector<FeatureVector>& samples,
                                                           const std::vector<Label>& labels,
                                                           const MdiForestParams& params = {});

}  // namespace cbstream::select
