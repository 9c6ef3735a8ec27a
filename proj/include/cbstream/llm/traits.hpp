#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cbstream/core/types.hpp"

namespace cbstream::llm {

/// The seven boolean traits returned by the feature prompt.
struct LlmTraits {
  static constexpr std::array<std::string_view, 7> kKeys = {"derogatory", "humiliating", "racist", "sarcasm",
                                                            "sexual",     "threatening", "violence"};
  std::array<bool, 7> flags{};

  bool derogatory() const { return flags[0]; }
  bool humiliating() const { return flags[1]; }
  bool racist() const { return flags[2]; }
  bool sarcasm() const { return flags[3]; }
  bool sexual() const { return flags[4]; }
  bool threatening() const { return flags[5]; }
  bool violence() const { return flags[6]; }

  std::optional<std::size_t> index_of(std::string_view key) const;
  bool any() const;

  friend bool operator==(const LlmTraits&, const LlmTraits&) = default;
};

class MalformedResponse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transport-level failure (timeout, HTTP error, unreadable envelope).
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The feature prompt up to and including the closing brace of the JSON example.
std::string_view feature_prompt_template();

/// Template followed by a newline and the raw, unpreprocessed post.
std::string build_feature_prompt(std::string_view raw_text);

/// Accepts a JSON object with exactly the seven keys, each 0 or 1, optionally
/// wrapped in whitespace or a ``` code fence. Throws MalformedResponse otherwise.
LlmTraits parse_trait_response(std::string_view body);

/// Compact JSON in the prompt's key order, e.g. {"derogatory":0,...}.
std::string to_json(const LlmTraits& traits);

/// A chat-completion endpoint reduced to prompt -> reply text. Implementations
/// must be safe to call from several threads. Throws BackendError.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(std::string_view prompt) = 0;
};

/// Phrase lists per trait for the offline responder.
struct TraitLexicon {
  std::array<std::vector<std::string>, 7> phrases;  // lowercase
  static const TraitLexicon& bundled();
  static TraitLexicon parse(std::string_view tsv);
};

/// Deterministic offline responder. Feature prompts get the trait JSON
/// (trait = 1 iff one of its phrases occurs, case-insensitively); explanation
/// prompts get a fixed-form sentence.
class MockChatBackend final : public ChatBackend {
 public:
  explicit MockChatBackend(const TraitLexicon& lexicon = TraitLexicon::bundled()) : lexicon_(lexicon) {}

  std::string complete(std::string_view prompt) override;

  LlmTraits detect(std::string_view raw_text) const;
  /// Reply for a feature prompt built from `raw_text`.
  std::string respond(std::string_view raw_text) const { return to_json(detect(raw_text)); }

 private:
  const TraitLexicon& lexicon_;
};

struct LlmBackendConfig {
  static constexpr double kTemperature = 0.0;

  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4o-mini";
  std::string api_token;
  double timeout_s = 30.0;
  int max_retries = 2;  // attempts = 1 + max_retries
  std::optional<std::string> cache_path;

  /// Reads CBSTREAM_LLM_ENDPOINT, CBSTREAM_LLM_MODEL and CBSTREAM_LLM_TOKEN
  /// (falling back to OPENAI_API_KEY).
  static LlmBackendConfig from_env();
};

/// Request body: {"model":..., "temperature":0, "messages":[{"role":"user","content":...}]}.
std::string build_chat_request(std::string_view model, std::string_view prompt);
/// choices[0].message.content of a chat-completion response. Throws BackendError.
std::string extract_chat_content(std::string_view response_body);

/// HTTP(S) chat-completion client.
class RemoteChatBackend final : public ChatBackend {
 public:
  explicit RemoteChatBackend(LlmBackendConfig config);
  std::string complete(std::string_view prompt) override;

 private:
  LlmBackendConfig config_;
  std::string base_;  // scheme://host[:port]
  std::string path_;
};

/// Lowercase hex SHA-256 of the text.
std::string content_hash(std::string_view text);

/// Append-only JSON-lines cache {"hash":..., "traits":{...}}. Single writer;
/// lookups and inserts are serialized internally.
class TraitCache {
 public:
  TraitCache() = default;
  explicit TraitCache(std::optional<std::string> path);

  std::optional<LlmTraits> find(const std::string& hash) const;
  void insert(const std::string& hash, const LlmTraits& traits);
  std::size_t size() const;

 private:
  std::optional<std::string> path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, LlmTraits> entries_;
};

struct TraitResult {
  LlmTraits traits;
  bool degraded = false;  // backend failed; traits are the all-false fallback
};

/// Cache-first trait extraction with retry and all-false fallback.
class TraitExtractor {
 public:
  TraitExtractor(ChatBackend& backend, TraitCache& cache, int max_retries = 2, std::size_t parallelism = 4);

  TraitResult extract(std::string_view raw_text);
  /// Same results as calling extract() in order; misses are fetched with
  /// bounded parallelism.
  std::vector<TraitResult> extract_all(std::span<const RawPost> posts);

  std::size_t backend_calls() const { return calls_.load(); }

 private:
  std::optional<LlmTraits> fetch(std::string_view raw_text);

  ChatBackend& backend_;
  TraitCache& cache_;
  int max_retries_;
  std::size_t parallelism_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace cbstream::llm
