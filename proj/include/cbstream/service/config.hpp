#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace cbstream::service {

/// JSON configuration of the moderation service. Keys match the member names;
/// all are optional. A model comes from `model_snapshot` (written by
/// `cbstream run --snapshot-out`) or, failing that, from a cold start on the
/// labeled CSV `cold_start_csv`. Without either the service answers 503.
struct ServiceConfig {
  std::string bind_address = "127.0.0.1";
  int port = 8080;

  std::optional<std::string> model_snapshot;
  std::optional<std::string> cold_start_csv;
  int scenario = 1;  // used only for a cold start
  std::string model = "arfc";
  std::string grid = "reference";
  std::size_t cold_start_size = 1500;
  std::uint64_t seed = 0;

  std::string llm = "mock";  // mock | remote
  std::optional<std::string> llm_cache;

  std::optional<std::string> event_log;     // JSON lines; replayed on start
  std::optional<std::string> snapshot_dir;  // periodic service snapshots
  std::size_t snapshot_every = 500;         // events between snapshots; 0 disables

  std::optional<std::string> auth_token;  // static bearer token for /api
  std::size_t page_size = 20;

  static ServiceConfig from_json(const nlohmann::json& j);
  static ServiceConfig load(const std::string& path);
  nlohmann::json to_json() const;
};

}  // namespace cbstream::service
