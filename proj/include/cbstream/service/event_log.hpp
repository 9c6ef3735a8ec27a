#pragma once

#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbstream/core/types.hpp"

namespace cbstream::service {

enum class EventKind : std::uint8_t { ingested, predicted, labeled, explained, mask_changed };

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct ModerationEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::ingested;
  Timestamp at{};
  nlohmann::json payload;

  /// {"seq":..,"kind":..,"at":..,"payload":{..}}
  std::string to_line() const;
  static ModerationEvent from_line(std::string_view line);
};

/// UTC, millisecond precision: 2024-01-31T12:00:00.123Z.
std::string format_time(Timestamp t);
Timestamp parse_time(std::string_view s);

/// Append-only JSON-lines log. Each append is flushed before returning.
class EventLog {
 public:
  EventLog() = default;
  /// Opens for appending, creating the file if needed.
  explicit EventLog(const std::string& path);

  bool enabled() const { return out_.is_open(); }
  void append(const ModerationEvent& event);

  /// All events in file order. A torn final line (no trailing newline) is
  /// ignored; any other malformed line throws std::runtime_error.
  static std::vector<ModerationEvent> read_all(const std::string& path);

 private:
  std::ofstream out_;
};

}  // namespace cbstream::service
