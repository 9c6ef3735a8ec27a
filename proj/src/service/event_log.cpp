#include "cbstream/service/event_log.hpp"

#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace cbstream::service {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::ingested: return "ingested";
    case EventKind::predicted: return "predicted";
    case EventKind::labeled: return "labeled";
    case EventKind::explained: return "explained";
    case EventKind::mask_changed: return "mask_changed";
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (auto k : {EventKind::ingested, EventKind::predicted, EventKind::labeled, EventKind::explained,
                 EventKind::mask_changed})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string format_time(Timestamp t) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(t.time_since_epoch()).count();
  auto secs = static_cast<std::time_t>(ms / 1000);
  auto rem = ms % 1000;
  if (rem < 0) {
    rem += 1000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(rem));
  return buf;
}

Timestamp parse_time(std::string_view s) {
  std::tm tm{};
  int ms = 0;
  const std::string str(s);
  if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                  &tm.tm_min, &tm.tm_sec, &ms) != 7)
    throw std::invalid_argument("bad timestamp: " + str);
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const auto secs = timegm(&tm);
  return Timestamp{} + std::chrono::seconds(secs) + std::chrono::milliseconds(ms);
}

std::string ModerationEvent::to_line() const {
  nlohmann::ordered_json j;
  j["seq"] = seq;
  j["kind"] = std::string(to_string(kind));
  j["at"] = format_time(at);
  j["payload"] = payload;
  return j.dump();
}

ModerationEvent ModerationEvent::from_line(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  ModerationEvent e;
  e.seq = j.at("seq").get<std::uint64_t>();
  const auto kind = parse_event_kind(j.at("kind").get<std::string>());
  if (!kind) throw std::runtime_error("unknown event kind in log");
  e.kind = *kind;
  e.at = parse_time(j.at("at").get<std::string>());
  e.payload = j.at("payload");
  return e;
}

EventLog::EventLog(const std::string& path) : out_(path, std::ios::app | std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open event log " + path);
}

void EventLog::append(const ModerationEvent& event) {
  out_ << event.to_line() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("event log write failed");
}

std::vector<ModerationEvent> EventLog::read_all(const std::string& path) {
  std::vector<ModerationEvent> events;
  std::ifstream in(path, std::ios::binary);
  if (!in) return events;
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    const auto end = content.find('\n', pos);
    ++line_no;
    if (end == std::string::npos) break;  // torn tail from an interrupted write
    const std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    try {
      auto e = ModerationEvent::from_line(line);
      if (!events.empty() && e.seq <= events.back().seq)
        throw std::runtime_error("sequence numbers not increasing");
      events.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return events;
}

}  // namespace cbstream::service
