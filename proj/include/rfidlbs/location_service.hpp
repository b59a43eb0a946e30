#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rfidlbs/credentials.hpp"
#include "rfidlbs/registry.hpp"

namespace rfidlbs {

/// Transport-neutral request. Header names are stored lowercase.
struct HttpRequest {
  std::string method = "GET";
  std::string path = "/";
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;
  std::string body;

  std::optional<std::string> header(std::string_view name) const;
  std::optional<std::string> param(std::string_view name) const;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

HttpResponse json_response(int status, const nlohmann::json& body);
HttpResponse error_response(int status, std::string_view message);

/// Content type for an asset, chosen by file extension.
std::string content_type_for(const std::filesystem::path& asset);

class AuthFailed : public std::runtime_error {
public:
  AuthFailed() : std::runtime_error("authentication failed") {}
};

/// The location server's request handler.
///
///   POST /login                body {"username","password"} -> {"token"}
///   GET  /locate?tag=HEX10     -> LocationRecord JSON
///   GET  /info?tag=HEX10&topic=T -> {"topic","text"}
///   GET  /image/{asset}        -> asset bytes
///   GET  /healthz              -> "ok"
///
/// /locate, /info and /image need a live session token in the X-Session
/// header (or a `session` query parameter, for <img> tags). The registry is
/// swapped atomically on reload and never mutated in place.
class LocationService {
public:
  LocationService(Registry registry, CredentialStore credentials,
                  std::optional<std::filesystem::path> assets_dir = std::nullopt,
                  SessionTable::Clock clock = {});

  HttpResponse handle(const HttpRequest& request);

  /// Throws AuthFailed, identically for unknown users and wrong passwords.
  Session login(std::string_view user, std::string_view password);

  /// Installs a new registry with version = old version + 1.
  void reload(Registry registry);
  std::shared_ptr<const Registry> registry() const;

  SessionTable& sessions() noexcept { return sessions_; }

private:
  HttpResponse handle_login(const HttpRequest& request);
  HttpResponse handle_locate(const HttpRequest& request);
  HttpResponse handle_info(const HttpRequest& request);
  HttpResponse handle_image(const HttpRequest& request);
  bool authorized(const HttpRequest& request);

  mutable std::mutex registry_mu_;
  std::shared_ptr<const Registry> registry_;
  CredentialStore credentials_;
  std::optional<std::filesystem::path> assets_dir_;
  SessionTable sessions_;
};

}  // namespace rfidlbs
