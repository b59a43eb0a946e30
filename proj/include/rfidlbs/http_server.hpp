#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "rfidlbs/location_service.hpp"

namespace rfidlbs {

/// HTTP/1.1 front end that forwards every request to a transport-neutral
/// handler. Backed by cpp-httplib.
class HttpServer {
public:
  using Handler = std::function<HttpResponse(const HttpRequest&)>;
  /// Produces the next server-sent event payload; nullopt closes the stream.
  using EventSource = std::function<std::optional<std::string>()>;

  explicit HttpServer(Handler handler);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Must be called before bind().
  void add_event_stream(const std::string& path, EventSource source,
                        std::chrono::milliseconds period);
  void mount_static(const std::string& prefix, const std::filesystem::path& dir);

  /// port 0 picks a free port. Returns the bound port; throws on failure.
  int bind(const std::string& host, int port);
  /// Serves on a background thread.
  void start();
  /// Serves on the calling thread until stop().
  void run();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rfidlbs
