#include <httplib.h>

#include "cbstream/llm/traits.hpp"

namespace cbstream::llm {

RemoteChatBackend::RemoteChatBackend(LlmBackendConfig config) : config_(std::move(config)) {
  const auto& url = config_.endpoint_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  base_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::string RemoteChatBackend::complete(std::string_view prompt) {
  httplib::Client client(base_);
  const auto secs = static_cast<time_t>(config_.timeout_s);
  const auto usecs = static_cast<time_t>((config_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  if (!config_.api_token.empty()) client.set_bearer_token_auth(config_.api_token);
  auto res = client.Post(path_, build_chat_request(config_.model_name, prompt), "application/json");
  if (!res) throw BackendError("chat-completion request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw BackendError("chat-completion HTTP status " + std::to_string(res->status));
  return extract_chat_content(res->body);
}

}  // namespace cbstream::llm
