#include "cbstream/pipeline/stream.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace cbstream::pipeline {
namespace {

constexpr std::string_view kSnapshotMagic = "CBSTREAM";
constexpr std::uint32_t kSnapshotVersion = 1;

constexpr std::uint64_t kModelSeedStream = 1;
constexpr std::uint64_t kMdiSeedStream = 2;

std::vector<Label> labels_of(std::span<const RawPost> posts) {
  std::vector<Label> out;
  out.reserve(posts.size());
  for (const auto& p : posts) {
    if (!p.label) throw std::invalid_argument("post " + p.id + " has no label");
    out.push_back(*p.label);
  }
  return out;
}

}  // namespace

nlohmann::json PipelineConfig::to_json() const {
  return {{"scenario", static_cast<int>(scenario)},
          {"cold_start_size", cold_start_size},
          {"model", std::string(to_string(model))},
          {"grid", grid == GridChoice::listing ? "listing" : "reference"},
          {"seed", seed}};
}

nlohmann::json GridSearchReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : points) {
    auto row = p.spec.to_json();
    row["macro_f1"] = p.macro_f1;
    rows.push_back(std::move(row));
  }
  return {{"points", rows}, {"selected", selected}, {"selected_params", points.empty() ? nlohmann::json() : best().spec.to_json()}};
}

StreamState::StreamState(Scenario scenario, ModelSpec spec, MaskedLearner learner,
                         std::optional<text::NgramVocabulary> vocab)
    : scenario_(scenario), spec_(std::move(spec)), learner_(std::move(learner)), tracker_(learner_.mask()),
      vocab_(std::move(vocab)) {}

Prediction StreamState::predict(const FeatureVector& features) const {
  const auto proba = learner_.predict_proba(restrict_to(features, tracker_.mask()));
  return Prediction{proba.argmax(), proba, spec_.describe()};
}

bool StreamState::learn(const FeatureVector& features, Label truth) {
  learner_.learn_one(restrict_to(features, tracker_.mask()), truth);
  const auto before = tracker_.mask().version;
  const auto& mask = tracker_.update(features);
  if (mask.version == before) return false;
  learner_.set_mask(mask);
  return true;
}

Prediction StreamState::prequential_step(const FeatureVector& features, Label truth) {
  auto p = predict(features);
  record(p.label, truth);
  learn(features, truth);
  return p;
}

StreamMetrics StreamState::full_metrics() const {
  auto c = cold_start_;
  c += streaming_;
  return compute_metrics(c);
}

void StreamState::save(BinaryWriter& out) const {
  out.str(kSnapshotMagic);
  out.u32(kSnapshotVersion);
  out.u8(static_cast<std::uint8_t>(scenario_));
  spec_.save(out);
  learner_.save(out);
  tracker_.save(out);
  out.boolean(vocab_.has_value());
  if (vocab_) vocab_->save(out);
  cold_start_.save(out);
  streaming_.save(out);
}

StreamState StreamState::load(BinaryReader& in) {
  if (in.str() != kSnapshotMagic) throw SnapshotError("not a stream snapshot");
  if (const auto v = in.u32(); v != kSnapshotVersion)
    throw SnapshotError("unsupported stream snapshot version " + std::to_string(v));
  const auto scenario = static_cast<Scenario>(in.u8());
  auto spec = ModelSpec::load(in);
  auto learner = MaskedLearner::load(in);
  auto tracker = select::VarianceTracker::load(in);
  std::optional<text::NgramVocabulary> vocab;
  if (in.boolean()) vocab = text::NgramVocabulary::load(in);
  StreamState s(scenario, std::move(spec), std::move(learner), std::move(vocab));
  s.tracker_ = std::move(tracker);
  s.cold_start_ = ConfusionCounts::load(in);
  s.streaming_ = ConfusionCounts::load(in);
  return s;
}

std::string StreamState::snapshot() const {
  BinaryWriter w;
  save(w);
  return w.take();
}

StreamState StreamState::from_snapshot(std::string_view bytes) {
  BinaryReader r(bytes);
  auto s = load(r);
  if (!r.done()) throw SnapshotError("trailing bytes after stream snapshot");
  return s;
}

ConfusionCounts evaluate_grid_point(const ModelSpec& spec, const FeatureSpace& space,
                                    const select::SelectionMask& mask, std::span<const FeatureVector> buffer,
                                    std::span<const Label> labels, std::uint64_t seed) {
  MaskedLearner learner(space, make_model(spec, space.size(), seed), mask);
  ConfusionCounts counts;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const auto x = restrict_to(buffer[i], mask);
    counts.add(learner.predict_proba(x).argmax(), labels[i]);
    learner.learn_one(x, labels[i]);
  }
  return counts;
}

ColdStartResult run_cold_start(const PipelineConfig& config, std::span<const RawPost> buffer,
                               FeatureExtractor& extractor) {
  if (buffer.empty()) throw std::invalid_argument("cold start requires a non-empty buffer");
  if (extractor.scenario() != config.scenario) throw std::invalid_argument("extractor scenario mismatch");
  const auto labels = labels_of(buffer);

  auto extracted = extractor.extract_all(buffer);
  if (config.scenario == Scenario::side_and_content) extractor.fit_vocabulary(extracted);
  std::vector<FeatureVector> features;
  features.reserve(extracted.size());
  for (auto& e : extracted) features.push_back(std::move(e.features));

  select::MdiForestParams mdi;
  mdi.seed = mix_seed(config.seed, kMdiSeedStream);
  auto importances = select::mdi_importances(extractor.universe(), features, labels, mdi);
  auto mask = select::select_from_importances(importances);
  const FeatureSpace space(mask.active);

  const auto model_seed = mix_seed(config.seed, kModelSeedStream);
  GridSearchReport report;
  for (const auto& spec : model_grid(config.model, config.grid)) {
    const auto counts = evaluate_grid_point(spec, space, mask, features, labels, model_seed);
    report.points.push_back({spec, compute_metrics(counts).macro.f1});
    const auto& cand = report.points.back();
    const auto& best = report.points[report.selected];
    if (cand.macro_f1 > best.macro_f1 || (cand.macro_f1 == best.macro_f1 && preferred_on_tie(cand.spec, best.spec)))
      report.selected = report.points.size() - 1;
  }

  // Retrain the winner from scratch; its prequential pass over the buffer is
  // the cold-start part of the full-stream metrics.
  const auto& spec = report.best().spec;
  MaskedLearner learner(space, make_model(spec, space.size(), model_seed), mask);
  ConfusionCounts cold;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto x = restrict_to(features[i], mask);
    cold.add(learner.predict_proba(x).argmax(), labels[i]);
    learner.learn_one(x, labels[i]);
  }
  StreamState state(config.scenario, spec, std::move(learner), extractor.vocabulary());
  state.set_cold_start_counts(cold);
  return ColdStartResult{std::move(state), std::move(report), std::move(importances)};
}

std::string prediction_log_line(const RawPost& post, const Prediction& p, std::uint64_t mask_version) {
  nlohmann::ordered_json j;
  j["id"] = post.id;
  j["predicted"] = std::string(to_string(p.label));
  j["proba"] = {{"absent", p.proba[Label::absent]}, {"present", p.proba[Label::present]}};
  j["true"] = post.label ? nlohmann::ordered_json(std::string(to_string(*post.label))) : nlohmann::ordered_json();
  j["mask_version"] = mask_version;
  return j.dump();
}

nlohmann::json RunResult::summary() const {
  nlohmann::json j;
  j["config"] = config.to_json();
  j["grid_search"] = report.to_json();
  j["importances"] = importances;
  j["cold_start_mask"] = cold_start_mask.to_json();
  j["degraded_extractions"] = degraded;
  if (state) {
    j["model"] = state->spec().describe();
    j["final_mask"] = state->mask().to_json();
    j["cold_start"] = compute_metrics(state->cold_start_counts()).to_json();
    j["streaming"] = state->streaming_metrics().to_json();
    j["full_stream"] = state->full_metrics().to_json();
  }
  return j;
}

RunResult run_stream(const PipelineConfig& config, std::span<const RawPost> posts, FeatureExtractor& extractor,
                     std::ostream* prediction_log) {
  if (config.cold_start_size < 2) throw std::invalid_argument("cold start size must be at least 2");
  if (posts.size() < config.cold_start_size) throw std::invalid_argument("stream shorter than the cold start");
  labels_of(posts);

  RunResult result;
  result.config = config;
  auto cold = run_cold_start(config, posts.first(config.cold_start_size), extractor);
  result.report = std::move(cold.report);
  result.importances = std::move(cold.importances);
  result.cold_start_mask = cold.state.mask();
  result.state.emplace(std::move(cold.state));
  auto& state = *result.state;

  const auto rest = posts.subspan(config.cold_start_size);
  constexpr std::size_t kChunk = 256;  // bounded prefetch of LLM features
  for (std::size_t begin = 0; begin < rest.size(); begin += kChunk) {
    const auto chunk = rest.subspan(begin, std::min(kChunk, rest.size() - begin));
    const auto extracted = extractor.extract_all(chunk);
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (extracted[i].degraded) ++result.degraded;
      const auto version = state.mask().version;
      const auto p = state.prequential_step(extracted[i].features, *chunk[i].label);
      if (prediction_log) *prediction_log << prediction_log_line(chunk[i], p, version) << '\n';
    }
  }
  return result;
}

}  // namespace cbstream::pipeline
