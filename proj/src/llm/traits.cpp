#include "cbstream/llm/traits.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "cbstream/core/data.hpp"
#include "cbstream/text/lexicon.hpp"

namespace cbstream::llm {
namespace {

using nlohmann::json;

constexpr std::string_view kFeaturePrompt =
    "This text has been taken from social media. Please \n"
    "analyze if it contains derogatory, humiliating, \n"
    "racist, sarcastic, sexual, threatening, or violent \n"
    "remarks, terms, and language, and return 1 if there \n"
    "exist and 0 otherwise. Following this JSON format. \n"
    "Do not add any explanation:\n"
    "{\"derogatory\":0,\n"
    "\"humiliating\":0,\n"
    "\"racist\":0,\n"
    "\"sarcasm\":0,\n"
    "\"sexual\":0,\n"
    "\"threatening\":0,\n"
    "\"violence\":0\n"
    "}";

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c); });
  return out;
}

std::string_view strip(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

std::string_view strip_code_fence(std::string_view s) {
  s = strip(s);
  if (!s.starts_with("```")) return s;
  const auto first_nl = s.find('\n');
  if (first_nl == std::string_view::npos) throw MalformedResponse("unterminated code fence");
  s = s.substr(first_nl + 1);
  s = strip(s);
  if (!s.ends_with("```")) throw MalformedResponse("unterminated code fence");
  s.remove_suffix(3);
  return strip(s);
}

std::string mock_explanation(std::string_view prompt) {
  std::string cls = "no-cyberbullying";
  if (auto p = prompt.find("categorized as "); p != std::string_view::npos) {
    auto rest = prompt.substr(p + 15);
    cls = std::string(rest.substr(0, rest.find(' ')));
  }
  std::vector<std::string> flagged;
  for (auto name : {"derogatory", "humiliation", "racist", "sarcasm", "sexual", "threatening", "violence"}) {
    if (prompt.find(std::string(name) + "=1") != std::string_view::npos) flagged.emplace_back(name);
  }
  std::string out = "The post was categorized as " + cls + " because ";
  if (flagged.empty()) {
    out += "none of the monitored traits were detected in its wording.";
  } else {
    out += "it shows ";
    for (std::size_t i = 0; i < flagged.size(); ++i) {
      if (i) out += i + 1 == flagged.size() ? " and " : ", ";
      out += flagged[i];
    }
    out += " cues in its wording.";
  }
  return out;
}

}  // namespace

std::optional<std::size_t> LlmTraits::index_of(std::string_view key) const {
  for (std::size_t i = 0; i < kKeys.size(); ++i)
    if (kKeys[i] == key) return i;
  return std::nullopt;
}

bool LlmTraits::any() const { return std::any_of(flags.begin(), flags.end(), [](bool b) { return b; }); }

std::string_view feature_prompt_template() { return kFeaturePrompt; }

std::string build_feature_prompt(std::string_view raw_text) {
  std::string out(kFeaturePrompt);
  out.push_back('\n');
  out.append(raw_text);
  return out;
}

LlmTraits parse_trait_response(std::string_view body) {
  const auto payload = strip_code_fence(body);
  json j;
  try {
    j = json::parse(payload);
  } catch (const json::parse_error& e) {
    throw MalformedResponse(std::string("unparseable trait response: ") + e.what());
  }
  if (!j.is_object()) throw MalformedResponse("trait response is not a JSON object");
  if (j.size() != LlmTraits::kKeys.size()) throw MalformedResponse("trait response must have exactly seven keys");
  LlmTraits traits;
  for (std::size_t i = 0; i < LlmTraits::kKeys.size(); ++i) {
    auto it = j.find(std::string(LlmTraits::kKeys[i]));
    if (it == j.end()) throw MalformedResponse("missing trait key: " + std::string(LlmTraits::kKeys[i]));
    if (!it->is_number_integer() && !it->is_number_unsigned())
      throw MalformedResponse("trait value is not 0/1: " + std::string(LlmTraits::kKeys[i]));
    const auto v = it->get<std::int64_t>();
    if (v != 0 && v != 1) throw MalformedResponse("trait value is not 0/1: " + std::string(LlmTraits::kKeys[i]));
    traits.flags[i] = v == 1;
  }
  return traits;
}

std::string to_json(const LlmTraits& traits) {
  std::string out = "{";
  for (std::size_t i = 0; i < LlmTraits::kKeys.size(); ++i) {
    if (i) out += ',';
    out += '"';
    out += LlmTraits::kKeys[i];
    out += "\":";
    out += traits.flags[i] ? '1' : '0';
  }
  out += '}';
  return out;
}

const TraitLexicon& TraitLexicon::bundled() {
  static const TraitLexicon lex = parse(data::bundled_file("trait_lexicon_en.tsv"));
  return lex;
}

TraitLexicon TraitLexicon::parse(std::string_view tsv) {
  TraitLexicon lex;
  const LlmTraits probe;
  for (auto& [trait, phrase] : text::parse_tsv(tsv)) {
    auto k = probe.index_of(trait);
    if (!k) throw std::runtime_error("unknown trait in lexicon: " + trait);
    lex.phrases[*k].push_back(lowercase(phrase));
  }
  return lex;
}

LlmTraits MockChatBackend::detect(std::string_view raw_text) const {
  const auto text = lowercase(raw_text);
  LlmTraits t;
  for (std::size_t k = 0; k < t.flags.size(); ++k) {
    t.flags[k] = std::any_of(lexicon_.phrases[k].begin(), lexicon_.phrases[k].end(),
                             [&](const std::string& p) { return text.find(p) != std::string::npos; });
  }
  return t;
}

std::string MockChatBackend::complete(std::string_view prompt) {
  if (prompt.starts_with(kFeaturePrompt)) {
    auto post = prompt.substr(kFeaturePrompt.size());
    if (!post.empty() && post.front() == '\n') post.remove_prefix(1);
    return respond(post);
  }
  if (prompt.starts_with("Generate an explanation")) return mock_explanation(prompt);
  return respond(prompt);
}

LlmBackendConfig LlmBackendConfig::from_env() {
  LlmBackendConfig c;
  if (const char* v = std::getenv("CBSTREAM_LLM_ENDPOINT")) c.endpoint_url = v;
  if (const char* v = std::getenv("CBSTREAM_LLM_MODEL")) c.model_name = v;
  if (const char* v = std::getenv("CBSTREAM_LLM_TOKEN")) {
    c.api_token = v;
  } else if (const char* k = std::getenv("OPENAI_API_KEY")) {
    c.api_token = k;
  }
  return c;
}

std::string build_chat_request(std::string_view model, std::string_view prompt) {
  json body = {{"model", model},
               {"temperature", 0},
               {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
  return body.dump();
}

std::string extract_chat_content(std::string_view response_body) {
  try {
    const auto j = json::parse(response_body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("unexpected chat-completion response: ") + e.what());
  }
}

std::string content_hash(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

TraitCache::TraitCache(std::optional<std::string> path) : path_(std::move(path)) {
  if (!path_) return;
  std::ifstream in(*path_);
  std::string line;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      entries_.insert_or_assign(j.at("hash").get<std::string>(), parse_trait_response(j.at("traits").dump()));
    } catch (const std::exception&) {
      // A torn final line from an interrupted run is skipped.
    }
  }
}

std::optional<LlmTraits> TraitCache::find(const std::string& hash) const {
  std::lock_guard lock(mutex_);
  if (auto it = entries_.find(hash); it != entries_.end()) return it->second;
  return std::nullopt;
}

void TraitCache::insert(const std::string& hash, const LlmTraits& traits) {
  std::lock_guard lock(mutex_);
  if (!entries_.emplace(hash, traits).second) return;
  if (path_) {
    std::ofstream out(*path_, std::ios::app);
    out << "{\"hash\":\"" << hash << "\",\"traits\":" << to_json(traits) << "}\n";
  }
}

std::size_t TraitCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

TraitExtractor::TraitExtractor(ChatBackend& backend, TraitCache& cache, int max_retries, std::size_t parallelism)
    : backend_(backend), cache_(cache), max_retries_(max_retries), parallelism_(std::max<std::size_t>(1, parallelism)) {}

std::optional<LlmTraits> TraitExtractor::fetch(std::string_view raw_text) {
  const auto prompt = build_feature_prompt(raw_text);
  for (int attempt = 0; attempt <= max_retries_; ++attempt) {
    ++calls_;
    try {
      return parse_trait_response(backend_.complete(prompt));
    } catch (const BackendError&) {
    } catch (const MalformedResponse&) {
    }
  }
  return std::nullopt;
}

TraitResult TraitExtractor::extract(std::string_view raw_text) {
  const auto hash = content_hash(raw_text);
  if (auto hit = cache_.find(hash)) return {*hit, false};
  if (auto traits = fetch(raw_text)) {
    cache_.insert(hash, *traits);
    return {*traits, false};
  }
  return {LlmTraits{}, true};
}

std::vector<TraitResult> TraitExtractor::extract_all(std::span<const RawPost> posts) {
  // Distinct uncached texts, in first-appearance order.
  std::vector<std::string_view> pending;
  {
    std::unordered_map<std::string, bool> seen;
    for (const auto& p : posts) {
      auto h = content_hash(p.text);
      if (seen.contains(h) || cache_.find(h)) continue;
      seen.emplace(std::move(h), true);
      pending.push_back(p.text);
    }
  }
  std::vector<std::optional<LlmTraits>> fetched(pending.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pending.size(); i = next++) fetched[i] = fetch(pending[i]);
  };
  {
    std::vector<std::jthread> pool;
    const auto n = std::min(parallelism_, pending.size());
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  std::unordered_map<std::string_view, TraitResult> degraded;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (fetched[i]) {
      cache_.insert(content_hash(pending[i]), *fetched[i]);
    } else {
      degraded.emplace(pending[i], TraitResult{LlmTraits{}, true});
    }
  }
  std::vector<TraitResult> out;
  out.reserve(posts.size());
  for (const auto& p : posts) {
    if (auto it = degraded.find(p.text); it != degraded.end()) {
      out.push_back(it->second);
    } else {
      out.push_back(extract(p.text));
    }
  }
  return out;
}

}  // namespace cbstream::llm
