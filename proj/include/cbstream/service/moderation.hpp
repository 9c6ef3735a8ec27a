#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbstream/explain/explanation.hpp"
#include "cbstream/llm/traits.hpp"
#include "cbstream/pipeline/features.hpp"
#include "cbstream/pipeline/metrics.hpp"
#include "cbstream/pipeline/stream.hpp"
#include "cbstream/service/config.hpp"
#include "cbstream/service/event_log.hpp"

namespace cbstream::service {

class ServiceUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class Conflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PostView {
  std::string id;
  std::string text;
  Timestamp received_at{};
  Label predicted = Label::absent;
  ClassDistribution proba;
  llm::LlmTraits traits;
  bool degraded = false;  // LLM trait extraction fell back
  std::optional<explain::Explanation> explanation;
  std::optional<Label> moderator_label;

  double confidence_pct() const { return 100.0 * proba.max(); }
  nlohmann::json to_json() const;
};

struct PostPage {
  std::size_t page = 1;  // 1-based
  std::size_t page_size = 0;
  std::size_t total = 0;
  std::vector<PostView> posts;
  nlohmann::json to_json() const;
};

/// Live moderation state. Ingestion predicts without learning; only moderator
/// labels train the model. Every mutation is appended to the event log, and
/// replaying that log reproduces the state exactly.
class ModerationService {
 public:
  explicit ModerationService(const ServiceConfig& config);
  /// Uses `backend` for traits and explanations instead of the configured one.
  ModerationService(const ServiceConfig& config, std::unique_ptr<llm::ChatBackend> backend);
  ~ModerationService();

  bool ready() const;
  PostView ingest_post(std::string text);
  pipeline::StreamMetrics submit_label(const std::string& post_id, Label label);
  pipeline::StreamMetrics get_metrics() const;
  PostPage get_posts(std::size_t page) const;
  PostView get_post(const std::string& post_id) const;
  explain::Explanation get_explanation(const std::string& post_id);
  select::SelectionMask mask() const;
  /// What the current model would say about `text`, without recording anything.
  Prediction preview(const std::string& text);
  std::size_t explanation_generations() const;
  std::uint64_t last_seq() const;

  /// Called after ingestion and labeling with the updated view, outside locks.
  using Listener = std::function<void(const PostView&)>;
  std::size_t subscribe(Listener listener);
  void unsubscribe(std::size_t token);

  /// Writes a service snapshot now (no-op without snapshot_dir).
  void write_snapshot();

 private:
  struct Record {
    PostView view;
    FeatureVector features;
  };

  void initialize();
  void replay(const std::vector<ModerationEvent>& events);
  void apply(const ModerationEvent& e);
  ModerationEvent log_event(EventKind kind, Timestamp at, nlohmann::json payload);
  void maybe_snapshot();
  void write_snapshot_locked();
  bool load_latest_snapshot();
  std::string snapshot_bytes() const;
  void restore_snapshot(std::string_view bytes);
  Record& record(const std::string& id);
  const Record& record(const std::string& id) const;
  void notify(const PostView& view);

  ServiceConfig config_;
  std::unique_ptr<llm::ChatBackend> backend_;
  llm::TraitCache cache_;
  std::unique_ptr<llm::TraitExtractor> traits_;
  std::unique_ptr<pipeline::FeatureExtractor> extractor_;

  mutable std::shared_mutex mutex_;
  std::optional<pipeline::StreamState> state_;
  pipeline::ConfusionCounts counts_;
  std::vector<Record> records_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::uint64_t next_post_ = 1;
  std::uint64_t applied_seq_ = 0;
  std::size_t events_since_snapshot_ = 0;
  EventLog log_;

  std::mutex explain_mutex_;
  std::size_t explanation_generations_ = 0;

  std::mutex listeners_mutex_;
  std::map<std::size_t, Listener> listeners_;
  std::size_t next_listener_ = 1;
};

}  // namespace cbstream::service
