#include "cbstream/service/http.hpp"

#include <httplib.h>

#include <chrono>

namespace cbstream::service {
namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

// Maps service exceptions to status codes.
template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const NotFound& e) {
    send_error(res, 404, e.what());
  } catch (const Conflict& e) {
    send_error(res, 409, e.what());
  } catch (const ServiceUnavailable& e) {
    send_error(res, 503, e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, std::string("bad request body: ") + e.what());
  } catch (const std::invalid_argument& e) {
    send_error(res, 400, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

}  // namespace

HttpServer::HttpServer(ModerationService& service, const ServiceConfig& config)
    : service_(service), config_(config), server_(std::make_unique<httplib::Server>()) {
  routes();
  listener_token_ = service_.subscribe([this](const PostView& v) { broadcast(v); });
}

HttpServer::~HttpServer() {
  service_.unsubscribe(listener_token_);
  stop();
}

void HttpServer::broadcast(const PostView& view) {
  const auto frame = "event: post\ndata: " + view.to_json().dump() + "\n\n";
  std::lock_guard lock(subscribers_mutex_);
  for (const auto& s : subscribers_) {
    {
      std::lock_guard sl(s->mutex);
      s->queue.push_back(frame);
    }
    s->cv.notify_one();
  }
}

void HttpServer::routes() {
  auto& srv = *server_;

  srv.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    if (req.method == "OPTIONS") {
      res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.status = 204;
      return httplib::Server::HandlerResponse::Handled;
    }
    if (config_.auth_token && req.path.starts_with("/api/") &&
        req.get_header_value("Authorization") != "Bearer " + *config_.auth_token) {
      send_error(res, 401, "missing or wrong bearer token");
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  srv.Post("/api/posts", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = json::parse(req.body);
      if (!body.is_object() || !body.contains("text") || !body["text"].is_string())
        throw std::invalid_argument("expected {\"text\": string}");
      send_json(res, 201, service_.ingest_post(body["text"].get<std::string>()).to_json());
    });
  });

  srv.Get("/api/posts", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::size_t page = 1;
      if (req.has_param("page")) {
        const auto p = req.get_param_value("page");
        std::size_t used = 0;
        const auto v = std::stoll(p, &used);
        if (used != p.size() || v < 1) throw std::invalid_argument("page must be a positive integer");
        page = static_cast<std::size_t>(v);
      }
      send_json(res, 200, service_.get_posts(page).to_json());
    });
  });

  srv.Get(R"(/api/posts/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, service_.get_post(req.matches[1]).to_json()); });
  });

  srv.Post(R"(/api/posts/([^/]+)/label)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = json::parse(req.body);
      const auto label = body.is_object() && body.contains("label") && body["label"].is_string()
                             ? parse_label(body["label"].get<std::string>())
                             : std::nullopt;
      if (!label) throw std::invalid_argument("expected {\"label\": \"absent\"|\"present\"}");
      send_json(res, 200, service_.submit_label(req.matches[1], *label).to_json());
    });
  });

  srv.Get(R"(/api/posts/([^/]+)/explanation)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto e = service_.get_explanation(req.matches[1]);
      send_json(res, 200, {{"text", e.text}, {"generated_at", format_time(e.generated_at)}, {"degraded", e.degraded}});
    });
  });

  srv.Get("/api/metrics", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      auto body = service_.get_metrics().to_json();
      body["mask"] = service_.ready() ? service_.mask().to_json() : json();
      body["ready"] = service_.ready();
      send_json(res, 200, body);
    });
  });

  srv.Get("/api/stream", [this](const httplib::Request&, httplib::Response& res) {
    auto sub = std::make_shared<Subscriber>();
    {
      std::lock_guard lock(subscribers_mutex_);
      subscribers_.push_back(sub);
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream",
        [sub](std::size_t, httplib::DataSink& sink) {
          std::unique_lock lock(sub->mutex);
          sub->cv.wait_for(lock, std::chrono::seconds(15), [&] { return sub->closed || !sub->queue.empty(); });
          if (sub->closed) return false;
          if (sub->queue.empty()) return sink.write(": keep-alive\n\n", 14);
          while (!sub->queue.empty()) {
            const auto frame = std::move(sub->queue.front());
            sub->queue.pop_front();
            if (!sink.write(frame.data(), frame.size())) return false;
          }
          return true;
        },
        [this, sub](bool) {
          std::lock_guard lock(subscribers_mutex_);
          std::erase(subscribers_, sub);
        });
  });
}

int HttpServer::bind() {
  const int port = config_.port == 0 ? server_->bind_to_any_port(config_.bind_address)
                                     : (server_->bind_to_port(config_.bind_address, config_.port) ? config_.port : -1);
  if (port < 0) throw std::runtime_error("cannot bind " + config_.bind_address + ":" + std::to_string(config_.port));
  bound_ = true;
  return port;
}

void HttpServer::listen() {
  if (!bound_) bind();
  server_->listen_after_bind();
}

void HttpServer::stop() {
  {
    std::lock_guard lock(subscribers_mutex_);
    for (const auto& s : subscribers_) {
      {
        std::lock_guard sl(s->mutex);
        s->closed = true;
      }
      s->cv.notify_all();
    }
  }
  server_->stop();
}

}  // namespace cbstream::service
