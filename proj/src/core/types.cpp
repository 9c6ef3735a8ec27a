#include "cbstream/core/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace cbstream {

std::string_view to_string(Label y) { return y == Label::present ? "present" : "absent"; }

std::optional<Label> parse_label(std::string_view text) {
  if (text == "present") return Label::present;
  if (text == "absent") return Label::absent;
  return std::nullopt;
}

ClassDistribution::ClassDistribution(double absent, double present) : p_{absent, present} {}

ClassDistribution ClassDistribution::from_weights(const std::array<double, kNumClasses>& w) {
  const double total = w[0] + w[1];
  if (!(total > 0.0)) return uniform();
  const double present = w[1] / total;
  return {1.0 - present, present};
}

FeatureSpace::FeatureSpace(std::vector<std::string> names) : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  if (std::adjacent_find(names_.begin(), names_.end()) != names_.end())
    throw std::invalid_argument("FeatureSpace: duplicate feature name");
}

std::optional<std::size_t> FeatureSpace::find(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

}  // namespace cbstream
