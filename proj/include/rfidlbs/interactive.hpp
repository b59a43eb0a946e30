#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>

#include <json.hpp>

#include "rfidlbs/http_server.hpp"
#include "rfidlbs/pipeline.hpp"

namespace rfidlbs {

struct InteractiveOptions {
  double speed = 1.0;  // simulated seconds per wall-clock second
  std::optional<std::filesystem::path> assets_dir;
  std::optional<std::filesystem::path> web_dir;  // served under /ui/
  CredentialStore credentials;
};

/// A pipeline that runs in real time and is driven over HTTP:
///
///   GET  /sim/state   snapshot {"t","user":{"x","y"},"tags":[...],
///                               "client_phase","location"}
///   POST /sim/steer   {"cmd":"goto","x","y"} | {"cmd":"vel","vx","vy"} |
///                     {"cmd":"stop"}
///   POST /sim/reset   rebuilds the world from the scenario
///   GET  /sim/events  the snapshot pushed as server-sent events at 10 Hz
///
/// Every other path is answered by the pipeline's location server, so the UI
/// can log in, fetch /info and load /image assets from the same origin.
class InteractiveSim {
public:
  InteractiveSim(Scenario scenario, Registry registry, InteractiveOptions options = {});
  ~InteractiveSim();

  HttpResponse handle(const HttpRequest& request);
  nlohmann::json snapshot();

  /// Advances the simulation by `seconds` of simulated time, synchronously.
  void advance(double seconds);

  /// Starts the real-time loop and the HTTP front end; returns the port.
  int start(const std::string& host, int port);
  void stop();

private:
  void rebuild();
  void loop(std::stop_token stop);
  HttpResponse handle_steer(const HttpRequest& request);

  Scenario scenario_;
  Registry registry_;
  InteractiveOptions options_;

  std::mutex mu_;
  std::unique_ptr<Pipeline> pipeline_;
  std::unique_ptr<HttpServer> server_;
  std::jthread loop_thread_;
};

}  // namespace rfidlbs
