#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbstream/core/types.hpp"
#include "cbstream/pipeline/features.hpp"
#include "cbstream/pipeline/grid.hpp"
#include "cbstream/pipeline/masked_learner.hpp"
#include "cbstream/pipeline/metrics.hpp"
#include "cbstream/select/mdi_forest.hpp"
#include "cbstream/select/selection.hpp"

namespace cbstream::pipeline {

struct PipelineConfig {
  Scenario scenario = Scenario::side_only;
  std::size_t cold_start_size = 1500;
  ModelKind model = ModelKind::arfc;
  GridChoice grid = GridChoice::listing;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

struct GridPoint {
  ModelSpec spec;
  double macro_f1 = 0.0;
};

struct GridSearchReport {
  std::vector<GridPoint> points;
  std::size_t selected = 0;

  const GridPoint& best() const { return points.at(selected); }
  nlohmann::json to_json() const;
};

/// Everything needed to continue a stream: the masked model, the variance
/// tracker, the frozen vocabulary and the running confusion counts.
class StreamState {
 public:
  StreamState(Scenario scenario, ModelSpec spec, MaskedLearner learner, std::optional<text::NgramVocabulary> vocab);

  Scenario scenario() const { return scenario_; }
  const ModelSpec& spec() const { return spec_; }
  const MaskedLearner& learner() const { return learner_; }
  const select::SelectionMask& mask() const { return tracker_.mask(); }
  const select::VarianceTracker& tracker() const { return tracker_; }
  const std::optional<text::NgramVocabulary>& vocabulary() const { return vocab_; }

  /// Applies the current mask and predicts. Never learns.
  Prediction predict(const FeatureVector& features) const;
  /// Learns through the current mask, then updates the variance tracker.
  /// Returns true when the mask membership changed.
  bool learn(const FeatureVector& features, Label truth);
  /// Test-then-train: predict, record (predicted, truth), learn.
  Prediction prequential_step(const FeatureVector& features, Label truth);

  void record(Label predicted, Label truth) { streaming_.add(predicted, truth); }
  void set_cold_start_counts(const ConfusionCounts& c) { cold_start_ = c; }
  const ConfusionCounts& cold_start_counts() const { return cold_start_; }
  const ConfusionCounts& streaming_counts() const { return streaming_; }
  StreamMetrics streaming_metrics() const { return compute_metrics(streaming_); }
  /// Cold-start prequential counts plus streaming counts.
  StreamMetrics full_metrics() const;

  void save(BinaryWriter& out) const;
  static StreamState load(BinaryReader& in);
  std::string snapshot() const;
  static StreamState from_snapshot(std::string_view bytes);

 private:
  Scenario scenario_;
  ModelSpec spec_;
  MaskedLearner learner_;
  select::VarianceTracker tracker_;
  std::optional<text::NgramVocabulary> vocab_;
  ConfusionCounts cold_start_;
  ConfusionCounts streaming_;
};

struct ColdStartResult {
  StreamState state;
  GridSearchReport report;
  std::map<std::string, double, std::less<>> importances;
};

/// Extracts features for the labeled buffer (fitting the vocabulary in
/// scenario 2), computes the MDI mask, scores every grid point by prequential
/// macro-F1 over the masked buffer, and returns a model with the winning
/// parameters trained on the buffer. Throws std::invalid_argument on an empty
/// or single-class buffer and on unlabeled posts.
ColdStartResult run_cold_start(const PipelineConfig& config, std::span<const RawPost> buffer,
                               FeatureExtractor& extractor);

/// Prequential score of one grid point over an already extracted buffer.
ConfusionCounts evaluate_grid_point(const ModelSpec& spec, const FeatureSpace& space,
                                    const select::SelectionMask& mask, std::span<const FeatureVector> buffer,
                                    std::span<const Label> labels, std::uint64_t seed);

struct RunResult {
  PipelineConfig config;
  GridSearchReport report;
  std::map<std::string, double, std::less<>> importances;
  select::SelectionMask cold_start_mask;
  std::optional<StreamState> state;
  std::size_t degraded = 0;

  /// Metrics summary: streaming (after cold start) and full-stream variants,
  /// grid report, masks and importances.
  nlohmann::json summary() const;
};

/// One JSON line per streamed sample: {id, predicted, proba, true, mask_version}.
std::string prediction_log_line(const RawPost& post, const Prediction& p, std::uint64_t mask_version);

/// Cold start on the first `cold_start_size` posts, then test-then-train over
/// the rest. Every post must carry a label.
RunResult run_stream(const PipelineConfig& config, std::span<const RawPost> posts, FeatureExtractor& extractor,
                     std::ostream* prediction_log = nullptr);

}  // namespace cbstream::pipeline
