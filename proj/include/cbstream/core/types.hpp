#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cbstream {

/// Binary moderation target. `present` is the positive class throughout.
enum class Label : std::uint8_t { absent = 0, present = 1 };

inline constexpr std::size_t kNumClasses = 2;

inline constexpr std::size_t index_of(Label y) { return static_cast<std::size_t>(y); }
inline constexpr Label label_at(std::size_t i) { return i == 0 ? Label::absent : Label::present; }

std::string_view to_string(Label y);
std::optional<Label> parse_label(std::string_view text);

using Timestamp = std::chrono::system_clock::time_point;

struct RawPost {
  std::string id;
  std::string text;
  Timestamp received_at{};
  std::optional<Label> label;
};

/// Probability per class. Always normalized; ties resolve to `absent`.
class ClassDistribution {
 public:
  ClassDistribution() = default;
  ClassDistribution(double absent, double present);

  static ClassDistribution uniform() { return {0.5, 0.5}; }
  /// Normalizes non-negative weights; all-zero weights give the uniform distribution.
  static ClassDistribution from_weights(const std::array<double, kNumClasses>& w);

  double operator[](Label y) const { return p_[index_of(y)]; }
  const std::array<double, kNumClasses>& values() const { return p_; }
  Label argmax() const { return p_[1] > p_[0] ? Label::present : Label::absent; }
  double max() const { return p_[1] > p_[0] ? p_[1] : p_[0]; }

 private:
  std::array<double, kNumClasses> p_{0.5, 0.5};
};

/// Named feature values as produced by the extractors. Booleans are 0/1.
using FeatureVector = std::map<std::string, double, std::less<>>;

/// Ordered, immutable list of feature names. Index order is lexicographic,
/// which makes "lowest index" the deterministic tie-break everywhere.
class FeatureSpace {
 public:
  FeatureSpace() = default;
  explicit FeatureSpace(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;

  friend bool operator==(const FeatureSpace&, const FeatureSpace&) = default;

 private:
  std::vector<std::string> names_;
};

/// Dense learner input over a FeatureSpace. Features outside the current
/// selection mask are carried as inactive and never read by learners.
struct Instance {
  std::vector<double> values;
  std::vector<std::uint8_t> active;  // empty means every feature is active

  Instance() = default;
  explicit Instance(std::vector<double> v) : values(std::move(v)) {}
  Instance(std::vector<double> v, std::vector<std::uint8_t> a)
      : values(std::move(v)), active(std::move(a)) {}

  std::size_t size() const { return values.size(); }
  bool has(std::size_t j) const { return active.empty() || active[j] != 0; }
  double operator[](std::size_t j) const { return values[j]; }
};

struct Prediction {
  Label label = Label::absent;
  ClassDistribution proba;
  std::string model_id;
};

}  // namespace cbstream
