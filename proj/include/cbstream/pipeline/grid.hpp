#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cbstream/learn/adaptive_random_forest.hpp"
#include "cbstream/learn/classifier.hpp"
#include "cbstream/learn/hoeffding_tree.hpp"

namespace cbstream::pipeline {

enum class ModelKind : std::uint8_t { gnb, hatc, arfc };

std::string_view to_string(ModelKind k);
std::optional<ModelKind> parse_model_kind(std::string_view s);

/// `listing`: the full hyperparameter grid (HATC 64 points, ARFC 80 points).
/// `reference`: the single point those grids were reported to select.
enum class GridChoice : std::uint8_t { listing, reference };

std::optional<GridChoice> parse_grid_choice(std::string_view s);

struct ModelSpec {
  ModelKind kind = ModelKind::arfc;
  learn::HoeffdingTreeParams hat;  // hatc only
  learn::ArfParams arf;            // arfc only

  /// e.g. "hatc(depth=200,tie=0.005,maxsize=200)".
  std::string describe() const;
  nlohmann::json to_json() const;
  /// Tie-break keys: member tree count and tree depth limit (unlimited = +inf).
  int tree_count() const;
  double depth_limit() const;

  void save(BinaryWriter& out) const;
  static ModelSpec load(BinaryReader& in);
  friend bool operator==(const ModelSpec& a, const ModelSpec& b);
};

std::vector<ModelSpec> model_grid(ModelKind kind, GridChoice choice);

/// True when `a` wins a tie against `b`: fewer trees, then smaller depth
/// limit, then the lexicographically smaller description.
bool preferred_on_tie(const ModelSpec& a, const ModelSpec& b);

std::unique_ptr<learn::Classifier> make_model(const ModelSpec& spec, std::size_t n_features, std::uint64_t seed);

}  // namespace cbstream::pipeline
