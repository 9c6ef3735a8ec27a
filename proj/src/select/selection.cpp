#include "cbstream/select/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbstream::select {

std::string_view to_string(SelectionStage s) { return s == SelectionStage::cold_start ? "cold_start" : "streaming"; }

bool SelectionMask::contains(std::string_view name) const {
  return std::binary_search(active.begin(), active.end(), name, std::less<>{});
}

nlohmann::json SelectionMask::to_json() const {
  return {{"active", active}, {"stage", std::string(to_string(stage))}, {"version", version}};
}

void SelectionMask::save(BinaryWriter& out) const {
  out.u8(static_cast<std::uint8_t>(stage));
  out.u64(version);
  out.u64(active.size());
  for (const auto& a : active) out.str(a);
}

SelectionMask SelectionMask::load(BinaryReader& in) {
  SelectionMask m;
  m.stage = static_cast<SelectionStage>(in.u8());
  m.version = in.u64();
  m.active.resize(in.u64());
  for (auto& a : m.active) a = in.str();
  return m;
}

SelectionMask select_from_importances(const std::map<std::string, double, std::less<>>& importances) {
  if (importances.empty()) throw std::invalid_argument("select_from_importances: no importances");
  double mean = 0.0;
  for (const auto& [name, v] : importances) mean += v;
  mean /= static_cast<double>(importances.size());
  const double cutoff = mean - 1e-12 * std::fabs(mean);
  SelectionMask m;
  m.version = 1;
  for (const auto& [name, v] : importances)
    if (v >= cutoff) m.active.push_back(name);
  return m;
}

VarianceTracker::VarianceTracker(const SelectionMask& cold_start)
    : names_(cold_start.active), stats_(cold_start.active.size()), mask_(cold_start) {}

const SelectionMask& VarianceTracker::update(const FeatureVector& x) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto it = x.find(names_[i]);
    stats_[i].update(it == x.end() ? 0.0 : it->second);
  }
  std::vector<std::string> active;
  if (samples() < 2.0) {
    active = names_;
  } else {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (stats_[i].m2 > 0.0) active.push_back(names_[i]);
    if (active.empty()) active = names_;
  }
  mask_.stage = SelectionStage::streaming;
  if (active != mask_.active) {
    mask_.active = std::move(active);
    ++mask_.version;
  }
  return mask_;
}

void VarianceTracker::save(BinaryWriter& out) const {
  out.u64(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    out.str(names_[i]);
    stats_[i].save(out);
  }
  mask_.save(out);
}

VarianceTracker VarianceTracker::load(BinaryReader& in) {
  VarianceTracker t;
  const auto n = in.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    t.names_.push_back(in.str());
    t.stats_.push_back(learn::GaussianEstimator::load(in));
  }
  t.mask_ = SelectionMask::load(in);
  return t;
}

}  // namespace cbstream::select
