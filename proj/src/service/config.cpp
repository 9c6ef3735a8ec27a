#include "cbstream/service/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace cbstream::service {
namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (const auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

template <typename T>
void read(const nlohmann::json& j, const char* key, std::optional<T>& out) {
  if (const auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("service config must be a JSON object");
  static const std::set<std::string> known = {
      "bind_address", "port",   "model_snapshot", "cold_start_csv", "scenario",       "model",
      "grid",         "cold_start_size", "seed",  "llm",            "llm_cache",      "event_log",
      "snapshot_dir", "snapshot_every",  "auth_token", "page_size"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw std::invalid_argument("unknown service config key: " + key);

  ServiceConfig c;
  read(j, "bind_address", c.bind_address);
  read(j, "port", c.port);
  read(j, "model_snapshot", c.model_snapshot);
  read(j, "cold_start_csv", c.cold_start_csv);
  read(j, "scenario", c.scenario);
  read(j, "model", c.model);
  read(j, "grid", c.grid);
  read(j, "cold_start_size", c.cold_start_size);
  read(j, "seed", c.seed);
  read(j, "llm", c.llm);
  read(j, "llm_cache", c.llm_cache);
  read(j, "event_log", c.event_log);
  read(j, "snapshot_dir", c.snapshot_dir);
  read(j, "snapshot_every", c.snapshot_every);
  read(j, "auth_token", c.auth_token);
  read(j, "page_size", c.page_size);
  if (c.scenario != 1 && c.scenario != 2) throw std::invalid_argument("scenario must be 1 or 2");
  if (c.llm != "mock" && c.llm != "remote") throw std::invalid_argument("llm must be mock or remote");
  if (c.page_size == 0) throw std::invalid_argument("page_size must be positive");
  return c;
}

ServiceConfig ServiceConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return from_json(nlohmann::json::parse(in));
}

nlohmann::json ServiceConfig::to_json() const {
  const auto opt = [](const std::optional<std::string>& s) { return s ? nlohmann::json(*s) : nlohmann::json(); };
  return {{"bind_address", bind_address},
          {"port", port},
          {"model_snapshot", opt(model_snapshot)},
          {"cold_start_csv", opt(cold_start_csv)},
          {"scenario", scenario},
          {"model", model},
          {"grid", grid},
          {"cold_start_size", cold_start_size},
          {"seed", seed},
          {"llm", llm},
          {"llm_cache", opt(llm_cache)},
          {"event_log", opt(event_log)},
          {"snapshot_dir", opt(snapshot_dir)},
          {"snapshot_every", snapshot_every},
          {"auth_token", opt(auth_token)},
          {"page_size", page_size}};
}

}  // namespace cbstream::service
