#include "cbstream/service/moderation.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cbstream/pipeline/corpus.hpp"

namespace cbstream::service {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kSnapshotMagic = "CBSERVICE";
constexpr std::uint32_t kSnapshotVersion = 1;

Timestamp now_ms() {
  using namespace std::chrono;
  return Timestamp{} + duration_cast<milliseconds>(system_clock::now().time_since_epoch());
}

std::unique_ptr<llm::ChatBackend> make_backend(const std::string& kind) {
  if (kind == "remote") return std::make_unique<llm::RemoteChatBackend>(llm::LlmBackendConfig::from_env());
  return std::make_unique<llm::MockChatBackend>();
}

json proba_json(const ClassDistribution& p) { return {{"absent", p[Label::absent]}, {"present", p[Label::present]}}; }

json traits_json(const llm::LlmTraits& t) {
  json j = json::object();
  for (std::size_t i = 0; i < t.flags.size(); ++i) j[std::string(llm::LlmTraits::kKeys[i])] = t.flags[i];
  return j;
}

llm::LlmTraits traits_from(const json& j) {
  llm::LlmTraits t;
  for (std::size_t i = 0; i < t.flags.size(); ++i) t.flags[i] = j.at(std::string(llm::LlmTraits::kKeys[i])).get<bool>();
  return t;
}

Label label_from(const json& j) {
  const auto l = parse_label(j.get<std::string>());
  if (!l) throw std::runtime_error("bad label in event");
  return *l;
}

std::int64_t to_ms(Timestamp t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}
Timestamp from_ms(std::int64_t ms) { return Timestamp{} + std::chrono::milliseconds(ms); }

}  // namespace

json PostView::to_json() const {
  json j;
  j["id"] = id;
  j["text"] = text;
  j["received_at"] = format_time(received_at);
  j["predicted"] = std::string(cbstream::to_string(predicted));
  j["proba"] = proba_json(proba);
  j["confidence_pct"] = confidence_pct();
  j["traits"] = traits_json(traits);
  j["degraded"] = degraded;
  j["explanation"] = explanation ? json{{"text", explanation->text},
                                       {"generated_at", format_time(explanation->generated_at)},
                                       {"degraded", explanation->degraded}}
                                 : json();
  j["moderator_label"] = moderator_label ? json(std::string(cbstream::to_string(*moderator_label))) : json();
  return j;
}

json PostPage::to_json() const {
  json items = json::array();
  for (const auto& p : posts) items.push_back(p.to_json());
  return {{"page", page}, {"page_size", page_size}, {"total", total}, {"posts", items}};
}

ModerationService::ModerationService(const ServiceConfig& config)
    : ModerationService(config, make_backend(config.llm)) {}

ModerationService::ModerationService(const ServiceConfig& config, std::unique_ptr<llm::ChatBackend> backend)
    : config_(config), backend_(std::move(backend)), cache_(config.llm_cache) {
  initialize();
}

ModerationService::~ModerationService() = default;

void ModerationService::initialize() {
  traits_ = std::make_unique<llm::TraitExtractor>(*backend_, cache_);
  if (config_.model_snapshot) {
    std::ifstream in(*config_.model_snapshot, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read model snapshot " + *config_.model_snapshot);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    state_.emplace(pipeline::StreamState::from_snapshot(bytes));
  } else if (config_.cold_start_csv) {
    pipeline::PipelineConfig pc;
    pc.scenario = static_cast<pipeline::Scenario>(config_.scenario);
    const auto model = pipeline::parse_model_kind(config_.model);
    const auto grid = pipeline::parse_grid_choice(config_.grid);
    if (!model || !grid) throw std::invalid_argument("bad model or grid in service config");
    pc.model = *model;
    pc.grid = *grid;
    pc.seed = config_.seed;
    const auto posts = pipeline::load_posts(*config_.cold_start_csv);
    pc.cold_start_size = std::min(config_.cold_start_size, posts.size());
    pipeline::FeatureExtractor cold(pc.scenario, *traits_);
    auto result = pipeline::run_cold_start(pc, std::span(posts).first(pc.cold_start_size), cold);
    state_.emplace(std::move(result.state));
  }

  if (config_.snapshot_dir) {
    fs::create_directories(*config_.snapshot_dir);
    load_latest_snapshot();
  }
  if (state_) {
    extractor_ = std::make_unique<pipeline::FeatureExtractor>(state_->scenario(), *traits_);
    if (state_->vocabulary()) extractor_->set_vocabulary(*state_->vocabulary());
  }
  if (config_.event_log) {
    const auto events = EventLog::read_all(*config_.event_log);
    std::vector<ModerationEvent> pending;
    for (const auto& e : events)
      if (e.seq > applied_seq_) pending.push_back(e);
    if (!pending.empty() && !state_) throw std::runtime_error("event log present but no model configured");
    replay(pending);
    log_ = EventLog(*config_.event_log);
  }
}

void ModerationService::replay(const std::vector<ModerationEvent>& events) {
  for (const auto& e : events) apply(e);
}

ModerationService::Record& ModerationService::record(const std::string& id) {
  const auto it = index_.find(id);
  if (it == index_.end()) throw NotFound("unknown post id: " + id);
  return records_[it->second];
}

const ModerationService::Record& ModerationService::record(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw NotFound("unknown post id: " + id);
  return records_[it->second];
}

// Single state transition shared by live operation and replay.
void ModerationService::apply(const ModerationEvent& e) {
  const auto& p = e.payload;
  switch (e.kind) {
    case EventKind::ingested: {
      Record r;
      r.view.id = p.at("id").get<std::string>();
      r.view.text = p.at("text").get<std::string>();
      r.view.received_at = e.at;
      if (index_.contains(r.view.id)) throw std::runtime_error("duplicate post id in log: " + r.view.id);
      index_.emplace(r.view.id, records_.size());
      records_.push_back(std::move(r));
      next_post_ = std::max(next_post_, p.at("n").get<std::uint64_t>() + 1);
      break;
    }
    case EventKind::predicted: {
      auto& r = record(p.at("id").get<std::string>());
      r.view.predicted = label_from(p.at("predicted"));
      r.view.proba = ClassDistribution(p.at("proba").at("absent").get<double>(),
                                       p.at("proba").at("present").get<double>());
      r.view.traits = traits_from(p.at("traits"));
      r.view.degraded = p.at("degraded").get<bool>();
      r.features.clear();
      for (const auto& [name, value] : p.at("features").items()) r.features.emplace(name, value.get<double>());
      break;
    }
    case EventKind::labeled: {
      auto& r = record(p.at("id").get<std::string>());
      if (r.view.moderator_label) throw std::runtime_error("post labeled twice in log: " + r.view.id);
      const auto y = label_from(p.at("label"));
      r.view.moderator_label = y;
      counts_.add(r.view.predicted, y);
      state_->learn(r.features, y);
      break;
    }
    case EventKind::explained: {
      auto& r = record(p.at("id").get<std::string>());
      r.view.explanation = explain::Explanation{p.at("text").get<std::string>(), e.at, p.at("degraded").get<bool>()};
      ++explanation_generations_;
      break;
    }
    case EventKind::mask_changed: {
      const auto& m = state_->mask();
      if (m.version != p.at("version").get<std::uint64_t>() ||
          m.active != p.at("active").get<std::vector<std::string>>())
        throw std::runtime_error("replay diverged: mask mismatch at seq " + std::to_string(e.seq));
      break;
    }
  }
  applied_seq_ = e.seq;
}

ModerationEvent ModerationService::log_event(EventKind kind, Timestamp at, json payload) {
  ModerationEvent e{applied_seq_ + 1, kind, at, std::move(payload)};
  if (log_.enabled()) log_.append(e);
  apply(e);
  ++events_since_snapshot_;
  return e;
}

bool ModerationService::ready() const {
  std::shared_lock lock(mutex_);
  return state_.has_value();
}

PostView ModerationService::ingest_post(std::string text) {
  if (!extractor_) throw ServiceUnavailable("model not initialized");
  const auto at = now_ms();
  // Feature extraction, including the LLM call, runs outside the writer lock.
  auto extracted = extractor_->extract(RawPost{"", text, at, std::nullopt});
  PostView view;
  {
    std::unique_lock lock(mutex_);
    const auto n = next_post_;
    const auto id = "p-" + std::to_string(n);
    log_event(EventKind::ingested, at, {{"id", id}, {"n", n}, {"text", std::move(text)}});
    const auto prediction = state_->predict(extracted.features);
    json features = json::object();
    for (const auto& [name, value] : extracted.features) features[name] = value;
    log_event(EventKind::predicted, at,
              {{"id", id},
               {"predicted", std::string(to_string(prediction.label))},
               {"proba", proba_json(prediction.proba)},
               {"traits", traits_json(extracted.traits)},
               {"degraded", extracted.degraded},
               {"features", std::move(features)}});
    view = record(id).view;
    maybe_snapshot();
  }
  notify(view);
  return view;
}

pipeline::StreamMetrics ModerationService::submit_label(const std::string& post_id, Label label) {
  PostView view;
  pipeline::StreamMetrics metrics;
  {
    std::unique_lock lock(mutex_);
    if (!state_) throw ServiceUnavailable("model not initialized");
    if (record(post_id).view.moderator_label) throw Conflict("post already labeled: " + post_id);
    const auto before = state_->mask().version;
    log_event(EventKind::labeled, now_ms(), {{"id", post_id}, {"label", std::string(to_string(label))}});
    const auto& m = state_->mask();
    if (m.version != before) log_event(EventKind::mask_changed, now_ms(), {{"version", m.version}, {"active", m.active}});
    view = record(post_id).view;
    metrics = pipeline::compute_metrics(counts_);
    maybe_snapshot();
  }
  notify(view);
  return metrics;
}

pipeline::StreamMetrics ModerationService::get_metrics() const {
  std::shared_lock lock(mutex_);
  return pipeline::compute_metrics(counts_);
}

PostPage ModerationService::get_posts(std::size_t page) const {
  std::shared_lock lock(mutex_);
  PostPage out;
  out.page = std::max<std::size_t>(page, 1);
  out.page_size = config_.page_size;
  out.total = records_.size();
  const auto begin = (out.page - 1) * out.page_size;
  for (std::size_t i = begin; i < records_.size() && i < begin + out.page_size; ++i)
    out.posts.push_back(records_[i].view);
  return out;
}

PostView ModerationService::get_post(const std::string& post_id) const {
  std::shared_lock lock(mutex_);
  return record(post_id).view;
}

explain::Explanation ModerationService::get_explanation(const std::string& post_id) {
  {
    std::shared_lock lock(mutex_);
    if (const auto& r = record(post_id); r.view.explanation) return *r.view.explanation;
  }
  // One generation per post: concurrent requests wait here and find the
  // cached result on the re-check.
  std::lock_guard gen(explain_mutex_);
  PostView view;
  {
    std::shared_lock lock(mutex_);
    view = record(post_id).view;
  }
  if (view.explanation) return *view.explanation;
  const auto req = explain::ExplanationRequest{view.predicted, view.confidence_pct(), view.traits, view.text};
  const auto generated = explain::generate_explanation(req, *backend_);
  std::unique_lock lock(mutex_);
  log_event(EventKind::explained, now_ms(),
            {{"id", post_id}, {"text", generated.text}, {"degraded", generated.degraded}});
  maybe_snapshot();
  return *record(post_id).view.explanation;
}

select::SelectionMask ModerationService::mask() const {
  std::shared_lock lock(mutex_);
  if (!state_) throw ServiceUnavailable("model not initialized");
  return state_->mask();
}

Prediction ModerationService::preview(const std::string& text) {
  if (!extractor_) throw ServiceUnavailable("model not initialized");
  const auto extracted = extractor_->extract(RawPost{"", text, {}, std::nullopt});
  std::shared_lock lock(mutex_);
  return state_->predict(extracted.features);
}

std::size_t ModerationService::explanation_generations() const {
  std::shared_lock lock(mutex_);
  return explanation_generations_;
}

std::uint64_t ModerationService::last_seq() const {
  std::shared_lock lock(mutex_);
  return applied_seq_;
}

std::size_t ModerationService::subscribe(Listener listener) {
  std::lock_guard lock(listeners_mutex_);
  listeners_.emplace(next_listener_, std::move(listener));
  return next_listener_++;
}

void ModerationService::unsubscribe(std::size_t token) {
  std::lock_guard lock(listeners_mutex_);
  listeners_.erase(token);
}

void ModerationService::notify(const PostView& view) {
  std::vector<Listener> targets;
  {
    std::lock_guard lock(listeners_mutex_);
    for (const auto& [token, l] : listeners_) targets.push_back(l);
  }
  for (const auto& l : targets) l(view);
}

void ModerationService::maybe_snapshot() {
  if (!config_.snapshot_dir || config_.snapshot_every == 0) return;
  if (events_since_snapshot_ >= config_.snapshot_every) write_snapshot_locked();
}

void ModerationService::write_snapshot() {
  std::unique_lock lock(mutex_);
  write_snapshot_locked();
}

void ModerationService::write_snapshot_locked() {
  if (!config_.snapshot_dir || !state_) return;
  char name[64];
  std::snprintf(name, sizeof name, "service-%012llu.snap", static_cast<unsigned long long>(applied_seq_));
  const auto path = fs::path(*config_.snapshot_dir) / name;
  const auto tmp = fs::path(path).concat(".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << snapshot_bytes();
    if (!out) throw std::runtime_error("cannot write snapshot " + tmp.string());
  }
  fs::rename(tmp, path);
  events_since_snapshot_ = 0;
}

std::string ModerationService::snapshot_bytes() const {
  BinaryWriter w;
  w.str(kSnapshotMagic);
  w.u32(kSnapshotVersion);
  w.u64(applied_seq_);
  w.u64(next_post_);
  w.u64(explanation_generations_);
  counts_.save(w);
  w.str(state_->snapshot());
  w.u64(records_.size());
  for (const auto& r : records_) {
    const auto& v = r.view;
    w.str(v.id);
    w.str(v.text);
    w.i64(to_ms(v.received_at));
    w.u8(static_cast<std::uint8_t>(v.predicted));
    w.f64(v.proba[Label::absent]);
    w.f64(v.proba[Label::present]);
    for (bool f : v.traits.flags) w.boolean(f);
    w.boolean(v.degraded);
    w.boolean(v.explanation.has_value());
    if (v.explanation) {
      w.str(v.explanation->text);
      w.i64(to_ms(v.explanation->generated_at));
      w.boolean(v.explanation->degraded);
    }
    w.boolean(v.moderator_label.has_value());
    if (v.moderator_label) w.u8(static_cast<std::uint8_t>(*v.moderator_label));
    w.u64(r.features.size());
    for (const auto& [name, value] : r.features) {
      w.str(name);
      w.f64(value);
    }
  }
  return w.take();
}

void ModerationService::restore_snapshot(std::string_view bytes) {
  BinaryReader in(bytes);
  if (in.str() != kSnapshotMagic) throw SnapshotError("not a service snapshot");
  if (in.u32() != kSnapshotVersion) throw SnapshotError("unsupported service snapshot version");
  applied_seq_ = in.u64();
  next_post_ = in.u64();
  explanation_generations_ = in.u64();
  counts_ = pipeline::ConfusionCounts::load(in);
  state_.emplace(pipeline::StreamState::from_snapshot(in.str()));
  records_.clear();
  index_.clear();
  const auto n = in.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    Record r;
    auto& v = r.view;
    v.id = in.str();
    v.text = in.str();
    v.received_at = from_ms(in.i64());
    v.predicted = static_cast<Label>(in.u8());
    const double a = in.f64();
    const double p = in.f64();
    v.proba = ClassDistribution(a, p);
    for (auto& f : v.traits.flags) f = in.boolean();
    v.degraded = in.boolean();
    if (in.boolean()) {
      explain::Explanation e;
      e.text = in.str();
      e.generated_at = from_ms(in.i64());
      e.degraded = in.boolean();
      v.explanation = std::move(e);
    }
    if (in.boolean()) v.moderator_label = static_cast<Label>(in.u8());
    const auto nf = in.u64();
    for (std::uint64_t k = 0; k < nf; ++k) {
      auto name = in.str();
      r.features.emplace(std::move(name), in.f64());
    }
    index_.emplace(v.id, records_.size());
    records_.push_back(std::move(r));
  }
  if (!in.done()) throw SnapshotError("trailing bytes after service snapshot");
}

bool ModerationService::load_latest_snapshot() {
  std::optional<fs::path> latest;
  for (const auto& entry : fs::directory_iterator(*config_.snapshot_dir)) {
    const auto name = entry.path().filename().string();
    if (!name.starts_with("service-") || entry.path().extension() != ".snap") continue;
    if (!latest || name > latest->filename().string()) latest = entry.path();
  }
  if (!latest) return false;
  std::ifstream in(*latest, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  restore_snapshot(bytes);
  return true;
}

}  // namespace cbstream::service
