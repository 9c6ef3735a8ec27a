#include "cbstream/pipeline/grid.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cbstream/learn/gaussian_nb.hpp"

namespace cbstream::pipeline {
namespace {

std::string number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::gnb: return "gnb";
    case ModelKind::hatc: return "hatc";
    case ModelKind::arfc: return "arfc";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) {
  if (s == "gnb") return ModelKind::gnb;
  if (s == "hatc") return ModelKind::hatc;
  if (s == "arfc") return ModelKind::arfc;
  return std::nullopt;
}

std::optional<GridChoice> parse_grid_choice(std::string_view s) {
  if (s == "listing") return GridChoice::listing;
  if (s == "reference") return GridChoice::reference;
  return std::nullopt;
}

std::string ModelSpec::describe() const {
  switch (kind) {
    case ModelKind::gnb: return "gnb()";
    case ModelKind::hatc:
      return "hatc(depth=" + (hat.max_depth ? std::to_string(*hat.max_depth) : std::string("None")) +
             ",tie=" + number(hat.tie_threshold) + ",maxsize=" + number(hat.max_size_mb) + ")";
    case ModelKind::arfc:
      return "arfc(n_models=" + std::to_string(arf.n_models) + ",max_features=" + arf.max_features.describe() +
             ",lambda=" + number(arf.lambda) + ")";
  }
  return "?";
}

nlohmann::json ModelSpec::to_json() const {
  nlohmann::json j{{"model", std::string(to_string(kind))}};
  if (kind == ModelKind::hatc) {
    j["depth"] = hat.max_depth ? nlohmann::json(*hat.max_depth) : nlohmann::json(nullptr);
    j["tie_threshold"] = hat.tie_threshold;
    j["max_size_mb"] = hat.max_size_mb;
    j["grace_period"] = hat.grace_period;
    j["split_confidence"] = hat.split_confidence;
  } else if (kind == ModelKind::arfc) {
    j["n_models"] = arf.n_models;
    j["max_features"] = arf.max_features.describe();
    j["lambda"] = arf.lambda;
  }
  return j;
}

int ModelSpec::tree_count() const {
  switch (kind) {
    case ModelKind::gnb: return 0;
    case ModelKind::hatc: return 1;
    case ModelKind::arfc: return arf.n_models;
  }
  return 0;
}

double ModelSpec::depth_limit() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case ModelKind::gnb: return 0.0;
    case ModelKind::hatc: return hat.max_depth ? *hat.max_depth : inf;
    case ModelKind::arfc: return arf.tree.max_depth ? *arf.tree.max_depth : inf;
  }
  return inf;
}

void ModelSpec::save(BinaryWriter& out) const {
  out.u8(static_cast<std::uint8_t>(kind));
  hat.save(out);
  arf.save(out);
}

ModelSpec ModelSpec::load(BinaryReader& in) {
  ModelSpec s;
  s.kind = static_cast<ModelKind>(in.u8());
  s.hat = learn::HoeffdingTreeParams::load(in);
  s.arf = learn::ArfParams::load(in);
  return s;
}

bool operator==(const ModelSpec& a, const ModelSpec& b) {
  return a.kind == b.kind && a.hat == b.hat && a.arf == b.arf;
}

std::vector<ModelSpec> model_grid(ModelKind kind, GridChoice choice) {
  std::vector<ModelSpec> grid;
  ModelSpec base;
  base.kind = kind;
  if (kind == ModelKind::gnb) return {base};
  if (choice == GridChoice::reference) return {base};  // defaults are the reference point
  if (kind == ModelKind::hatc) {
    for (std::optional<int> depth : {std::optional<int>{}, std::optional<int>{50}, std::optional<int>{100},
                                     std::optional<int>{200}})
      for (double tie : {0.9, 0.5, 0.05, 0.005})
        for (double size : {15.0, 50.0, 100.0, 200.0}) {
          ModelSpec s = base;
          s.hat.max_depth = depth;
          s.hat.tie_threshold = tie;
          s.hat.max_size_mb = size;
          grid.push_back(s);
        }
    return grid;
  }
  for (int n : {10, 25, 50, 75, 100})
    for (auto mf : {learn::FeatureBudget::sqrt(), learn::FeatureBudget::count(4), learn::FeatureBudget::count(10),
                    learn::FeatureBudget::count(25)})
      for (double lambda : {2.0, 6.0, 10.0, 25.0}) {
        ModelSpec s = base;
        s.arf.n_models = n;
        s.arf.max_features = mf;
        s.arf.lambda = lambda;
        grid.push_back(s);
      }
  return grid;
}

bool preferred_on_tie(const ModelSpec& a, const ModelSpec& b) {
  if (a.tree_count() != b.tree_count()) return a.tree_count() < b.tree_count();
  if (a.depth_limit() != b.depth_limit()) return a.depth_limit() < b.depth_limit();
  return a.describe() < b.describe();
}

std::unique_ptr<learn::Classifier> make_model(const ModelSpec& spec, std::size_t n_features, std::uint64_t seed) {
  switch (spec.kind) {
    case ModelKind::gnb: return std::make_unique<learn::GaussianNaiveBayes>(n_features);
    case ModelKind::hatc: return std::make_unique<learn::HoeffdingTree>(n_features, spec.hat);
    case ModelKind::arfc: return std::make_unique<learn::AdaptiveRandomForest>(n_features, spec.arf, seed);
  }
  return nullptr;
}

}  // namespace cbstream::pipeline
