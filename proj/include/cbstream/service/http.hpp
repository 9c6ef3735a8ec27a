#pragma once

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <string>

#include "cbstream/service/config.hpp"
#include "cbstream/service/moderation.hpp"

namespace httplib {
class Server;
}

namespace cbstream::service {

/// JSON-over-HTTP facade:
///   POST /api/posts {text}              -> 201 PostView
///   GET  /api/posts?page=N              -> page of PostViews (1-based, ingestion order)
///   GET  /api/posts/{id}                -> PostView
///   POST /api/posts/{id}/label {label}  -> metrics (409 when already labeled)
///   GET  /api/posts/{id}/explanation    -> explanation, generated once
///   GET  /api/metrics                   -> metrics and current mask
///   GET  /api/stream                    -> server-sent events, one "post" event per change
/// With an auth token configured every /api route needs "Authorization: Bearer <token>".
class HttpServer {
 public:
  HttpServer(ModerationService& service, const ServiceConfig& config);
  ~HttpServer();

  /// Binds to config address/port (port 0 picks a free one); returns the port.
  int bind();
  /// Serves until stop(). Binds first if bind() was not called.
  void listen();
  void stop();

 private:
  struct Subscriber {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<std::string> queue;
    bool closed = false;
  };

  void routes();
  void broadcast(const PostView& view);

  ModerationService& service_;
  ServiceConfig config_;
  std::unique_ptr<httplib::Server> server_;
  std::size_t listener_token_ = 0;
  bool bound_ = false;

  std::mutex subscribers_mutex_;
  std::vector<std::shared_ptr<Subscriber>> subscribers_;
};

}  // namespace cbstream::service
