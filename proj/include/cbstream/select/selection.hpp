#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cbstream/core/binary_io.hpp"
#include "cbstream/core/types.hpp"
#include "cbstream/learn/gaussian.hpp"

namespace cbstream::select {

enum class SelectionStage : std::uint8_t { cold_start, streaming };

std::string_view to_string(SelectionStage s);

struct SelectionMask {
  std::vector<std::string> active;  // sorted, unique
  SelectionStage stage = SelectionStage::cold_start;
  std::uint64_t version = 0;

  bool contains(std::string_view name) const;
  std::size_t size() const { return active.size(); }
  nlohmann::json to_json() const;

  void save(BinaryWriter& out) const;
  static SelectionMask load(BinaryReader& in);

  friend bool operator==(const SelectionMask&, const SelectionMask&) = default;
};

/// Keeps features whose importance is at least the mean importance. A relative
/// tolerance of 1e-12 absorbs rounding so that uniform importances all pass.
/// Returns version 1, stage cold_start. Throws std::invalid_argument when empty.
SelectionMask select_from_importances(const std::map<std::string, double, std::less<>>& importances);

/// Running variance of every feature retained at cold start, over the whole
/// post-cold-start stream. A feature whose variance is exactly 0 leaves the
/// mask and returns as soon as it turns positive. Until two samples have been
/// seen no variance is defined and the cold-start set is emitted unchanged;
/// if every feature is constant the cold-start set is kept as well.
class VarianceTracker {
 public:
  VarianceTracker() = default;
  explicit VarianceTracker(const SelectionMask& cold_start);

  /// Absent features read as 0. Returns the mask in force after the update.
  const SelectionMask& update(const FeatureVector& x);
  const SelectionMask& mask() const { return mask_; }
  const std::vector<std::string>& universe() const { return names_; }
  const learn::GaussianEstimator& stats(std::size_t i) const { return stats_[i]; }
  double samples() const { return stats_.empty() ? 0.0 : stats_.front().weight; }

  void save(BinaryWriter& out) const;
  static VarianceTracker load(BinaryReader& in);

 private:
  std::vector<std::string> names_;
  std::vector<learn::GaussianEstimator> stats_;
  SelectionMask mask_;
};

}  // namespace cbstream::select
