#include "rfidlbs/http_server.hpp"

#include <httplib.h>

#include <atomic>
#include <cctype>
#include <stdexcept>
#include <thread>

namespace rfidlbs {

namespace {

HttpRequest to_request(const httplib::Request& req) {
  HttpRequest out;
  out.method = req.method;
  out.path = req.path;
  out.body = req.body;
  for (const auto& [k, v] : req.params) out.query.emplace(k, v);
  for (const auto& [k, v] : req.headers) {
    std::string key = k;
    for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.headers.emplace(std::move(key), v);
  }
  return out;
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(Handler h) : handler(std::move(h)) {
    // httplib defaults to SO_REUSEPORT, which lets a second server silently
    // share a port that is already taken.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
  }

  Handler handler;
  httplib::Server server;
  std::thread thread;
  std::atomic<bool> stopping{false};
  bool routes_installed = false;

  void install_routes() {
    if (routes_installed) return;
    routes_installed = true;
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      HttpResponse r;
      try {
        r = handler(to_request(req));
      } catch (const std::exception& e) {
        r = error_response(500, e.what());
      }
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    server.Get(".*", forward);
    server.Post(".*", forward);
    server.Put(".*", forward);
    server.Delete(".*", forward);
    server.Patch(".*", forward);
  }
};

HttpServer::HttpServer(Handler handler) : impl_(std::make_unique<Impl>(std::move(handler))) {}

HttpServer::~HttpServer() { stop(); }

void HttpServer::add_event_stream(const std::string& path, EventSource source,
                                  std::chrono::milliseconds period) {
  auto* impl = impl_.get();
  impl->server.Get(path, [impl, source, period](const httplib::Request&,
                                                httplib::Response& res) {
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [impl, source, period](std::size_t, httplib::DataSink& sink) {
          if (impl->stopping) return false;
          const auto event = source();
          if (!event) {
            sink.done();
            return true;
          }
          const std::string msg = "data: " + *event + "\n\n";
          if (!sink.write(msg.data(), msg.size())) return false;
          std::this_thread::sleep_for(period);
          return !impl->stopping.load();
        });
  });
}

void HttpServer::mount_static(const std::string& prefix, const std::filesystem::path& dir) {
  if (!impl_->server.set_mount_point(prefix, dir.string())) {
    throw std::runtime_error("cannot serve static files from " + dir.string());
  }
}

int HttpServer::bind(const std::string& host, int port) {
  impl_->install_routes();
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (!impl_) return;
  impl_->stopping = true;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace rfidlbs
