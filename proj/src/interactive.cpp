#include "rfidlbs/interactive.hpp"

#include <chrono>
#include <cmath>

namespace rfidlbs {

InteractiveSim::InteractiveSim(Scenario scenario, Registry registry,
                               InteractiveOptions options)
    : scenario_(std::move(scenario)),
      registry_(std::move(registry)),
      options_(std::move(options)) {
  if (!(options_.speed > 0.0)) throw std::invalid_argument("speed must be positive");
  rebuild();
}

InteractiveSim::~InteractiveSim() { stop(); }

void InteractiveSim::rebuild() {
  pipeline_ = std::make_unique<Pipeline>(scenario_, registry_, options_.credentials,
                                         options_.assets_dir);
  pipeline_->set_logging(false);
}

nlohmann::json InteractiveSim::snapshot() {
  std::lock_guard lock(mu_);
  const auto& w = pipeline_->world().state();
  nlohmann::json tags = nlohmann::json::array();
  for (const auto& [id, pos] : w.tag_positions) {
    tags.push_back({{"id", id.to_string()},
                    {"x", pos.x},
                    {"y", pos.y},
                    {"powered", w.powered.contains(id)},
                    {"killed", w.tags.at(id).killed}});
  }
  const auto& cs = pipeline_->client().state();
  nlohmann::json j{{"t", w.clock},
                   {"user", {{"x", w.user_position.x}, {"y", w.user_position.y}}},
                   {"tags", std::move(tags)},
                   {"client_phase", to_string(cs.phase)},
                   {"location", cs.record ? cs.record->to_json() : nlohmann::json(nullptr)},
                   {"range", preset(scenario_.preset).read_range_m}};
  return j;
}

void InteractiveSim::advance(double seconds) {
  std::lock_guard lock(mu_);
  const auto ticks = static_cast<std::uint64_t>(std::llround(seconds / scenario_.dt));
  for (std::uint64_t i = 0; i < ticks; ++i) pipeline_->step();
}

HttpResponse InteractiveSim::handle_steer(const HttpRequest& request) {
  const auto body = nlohmann::json::parse(request.body, nullptr, false);
  if (body.is_discarded() || !body.is_object() || !body.contains("cmd") ||
      !body["cmd"].is_string()) {
    return error_response(400, "expected {\"cmd\": \"goto\"|\"vel\"|\"stop\", ...}");
  }
  const auto cmd = body["cmd"].get<std::string>();
  auto num = [&](const char* key) -> std::optional<double> {
    if (!body.contains(key) || !body[key].is_number()) return std::nullopt;
    const double v = body[key].get<double>();
    return std::isfinite(v) ? std::optional(v) : std::nullopt;
  };

  SteerCommand command;
  if (cmd == "stop") {
    command = Stop{};
  } else if (cmd == "vel") {
    const auto vx = num("vx"), vy = num("vy");
    if (!vx || !vy) return error_response(400, "vel needs numeric vx and vy");
    command = SetVelocity{*vx, *vy};
  } else if (cmd == "goto") {
    const auto x = num("x"), y = num("y");
    if (!x || !y) return error_response(400, "goto needs numeric x and y");
    command = GoTo{{*x, *y}};
  } else {
    return error_response(400, "unknown cmd '" + cmd + "'");
  }
  std::lock_guard lock(mu_);
  pipeline_->steer(command);
  return json_response(200, nlohmann::json{{"ok", true}});
}

HttpResponse InteractiveSim::handle(const HttpRequest& request) {
  if (request.path == "/sim/state") {
    if (request.method != "GET") return error_response(405, "method not allowed");
    return json_response(200, snapshot());
  }
  if (request.path == "/sim/steer") {
    if (request.method != "POST") return error_response(405, "method not allowed");
    return handle_steer(request);
  }
  if (request.path == "/sim/reset") {
    if (request.method != "POST") return error_response(405, "method not allowed");
    std::lock_guard lock(mu_);
    rebuild();
    return json_response(200, nlohmann::json{{"ok", true}});
  }
  if (request.path.starts_with("/sim/")) return error_response(404, "no such endpoint");

  // Held so a concurrent /sim/reset cannot destroy the service mid-request.
  std::lock_guard lock(mu_);
  return pipeline_->service().handle(request);
}

void InteractiveSim::loop(std::stop_token stop) {
  using clock = std::chrono::steady_clock;
  const auto tick_wall = std::chrono::duration<double>(scenario_.dt / options_.speed);
  auto last = clock::now();
  double owed = 0.0;  // simulated seconds not yet stepped
  while (!stop.stop_requested()) {
    std::this_thread::sleep_for(std::chrono::duration_cast<clock::duration>(tick_wall));
    const auto now = clock::now();
    owed += std::chrono::duration<double>(now - last).count() * options_.speed;
    last = now;
    std::lock_guard lock(mu_);
    // Cap the catch-up so a stalled host does not freeze the API.
    owed = std::min(owed, 1.0);
    while (owed >= scenario_.dt) {
      pipeline_->step();
      owed -= scenario_.dt;
    }
  }
}

int InteractiveSim::start(const std::string& host, int port) {
  server_ = std::make_unique<HttpServer>([this](const HttpRequest& r) { return handle(r); });
  server_->add_event_stream(
      "/sim/events", [this]() -> std::optional<std::string> { return snapshot().dump(); },
      std::chrono::milliseconds(100));
  if (options_.web_dir) server_->mount_static("/ui", *options_.web_dir);
  const int bound = server_->bind(host, port);
  loop_thread_ = std::jthread([this](std::stop_token st) { loop(st); });
  server_->start();
  return bound;
}

void InteractiveSim::stop() {
  if (loop_thread_.joinable()) {
    loop_thread_.request_stop();
    loop_thread_.join();
  }
  if (server_) {
    server_->stop();
    server_.reset();
  }
}

}  // namespace rfidlbs
