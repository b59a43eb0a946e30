#include "rfidlbs/location_service.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <iterator>

namespace rfidlbs {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double steady_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

constexpr std::string_view kImagePrefix = "/image/";

}  // namespace

std::optional<std::string> HttpRequest::header(std::string_view name) const {
  const auto it = headers.find(lowercase(name));
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> HttpRequest::param(std::string_view name) const {
  const auto it = query.find(std::string(name));
  if (it == query.end()) return std::nullopt;
  return it->second;
}

HttpResponse json_response(int status, const nlohmann::json& body) {
  return HttpResponse{status, "application/json", body.dump()};
}

HttpResponse error_response(int status, std::string_view message) {
  return json_response(status, nlohmann::json{{"error", message}});
}

std::string content_type_for(const std::filesystem::path& asset) {
  const std::string ext = lowercase(asset.extension().string());
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".webp") return "image/webp";
  if (ext == ".bmp") return "image/bmp";
  return "application/octet-stream";
}

LocationService::LocationService(Registry registry, CredentialStore credentials,
                                 std::optional<std::filesystem::path> assets_dir,
                                 SessionTable::Clock clock)
    : registry_(std::make_shared<const Registry>(std::move(registry))),
      credentials_(std::move(credentials)),
      assets_dir_(std::move(assets_dir)),
      sessions_(clock ? std::move(clock) : SessionTable::Clock(steady_seconds)) {}

std::shared_ptr<const Registry> LocationService::registry() const {
  std::lock_guard lock(registry_mu_);
  return registry_;
}

void LocationService::reload(Registry registry) {
  std::lock_guard lock(registry_mu_);
  registry.version = registry_->version + 1;
  registry_ = std::make_shared<const Registry>(std::move(registry));
}

Session LocationService::login(std::string_view user, std::string_view password) {
  if (!credentials_.verify(user, password)) throw AuthFailed();
  return sessions_.issue(std::string(user));
}

bool LocationService::authorized(const HttpRequest& request) {
  auto token = request.header("X-Session");
  if (!token) token = request.param("session");
  return token && sessions_.validate(*token).has_value();
}

HttpResponse LocationService::handle(const HttpRequest& request) {
  const std::string& path = request.path;
  const bool is_get = request.method == "GET";

  if (path == "/healthz") {
    if (!is_get) return error_response(405, "method not allowed");
    return HttpResponse{200, "text/plain", "ok"};
  }
  if (path == "/login") {
    if (request.method != "POST") return error_response(405, "method not allowed");
    return handle_login(request);
  }
  if (path == "/locate" || path == "/info" || path.starts_with(kImagePrefix)) {
    if (!is_get) return error_response(405, "method not allowed");
    if (!authorized(request)) return error_response(401, "missing or invalid session");
    if (path == "/locate") return handle_locate(request);
    if (path == "/info") return handle_info(request);
    return handle_image(request);
  }
  return error_response(404, "no such endpoint");
}

HttpResponse LocationService::handle_login(const HttpRequest& request) {
  const auto body = nlohmann::json::parse(request.body, nullptr, false);
  if (body.is_discarded() || !body.is_object() || !body.contains("username") ||
      !body.contains("password") || !body["username"].is_string() ||
      !body["password"].is_string()) {
    return error_response(400, "expected {\"username\",\"password\"}");
  }
  try {
    const Session s = login(body["username"].get<std::string>(),
                            body["password"].get<std::string>());
    return json_response(200, nlohmann::json{{"token", s.token}});
  } catch (const AuthFailed&) {
    return error_response(401, "authentication failed");
  }
}

HttpResponse LocationService::handle_locate(const HttpRequest& request) {
  const auto tag_text = request.param("tag");
  const auto tag = tag_text ? TagId::try_parse(*tag_text) : std::nullopt;
  if (!tag) return error_response(400, "tag must be 10 hex characters");

  const auto reg = registry();
  const auto it = reg->records.find(*tag);
  if (it == reg->records.end()) return error_response(404, "tag not registered");
  return json_response(200, it->second.to_json());
}

HttpResponse LocationService::handle_info(const HttpRequest& request) {
  const auto tag_text = request.param("tag");
  const auto tag = tag_text ? TagId::try_parse(*tag_text) : std::nullopt;
  if (!tag) return error_response(400, "tag must be 10 hex characters");
  const auto topic = request.param("topic");
  if (!topic || topic->empty()) return error_response(400, "missing topic");

  const auto reg = registry();
  const auto rec = reg->records.find(*tag);
  if (rec == reg->records.end()) return error_response(404, "tag not registered");
  const auto text = rec->second.extras.find(*topic);
  if (text == rec->second.extras.end()) return error_response(404, "no such topic");
  return json_response(200, nlohmann::json{{"topic", *topic}, {"text", text->second}});
}

HttpResponse LocationService::handle_image(const HttpRequest& request) {
  const std::filesystem::path asset(request.path.substr(kImagePrefix.size()));
  const bool unsafe = asset.empty() || asset.is_absolute() ||
                      std::any_of(asset.begin(), asset.end(),
                                  [](const auto& part) { return part == ".."; });
  if (!assets_dir_ || unsafe) return error_response(404, "no such asset");

  const auto file = *assets_dir_ / asset;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(file, ec)) {
    return error_response(404, "no such asset");
  }
  std::ifstream in(file, std::ios::binary);
  if (!in) return error_response(404, "no such asset");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return HttpResponse{200, content_type_for(asset), std::move(bytes)};
}

}  // namespace rfidlbs
