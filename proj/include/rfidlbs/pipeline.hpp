#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfidlbs/client_core.hpp"
#include "rfidlbs/location_service.hpp"
#include "rfidlbs/middleware.hpp"
#include "rfidlbs/reader_link.hpp"
#include "rfidlbs/scenario.hpp"
#include "rfidlbs/sim_world.hpp"

namespace rfidlbs {

enum class LogKind { FrameEmitted, LocationChanged, LocationLost, Located };

std::string_view to_string(LogKind kind) noexcept;

struct LogEntry {
  double time = 0.0;
  LogKind kind = LogKind::FrameEmitted;
  std::string payload;
  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

/// Replayable trace of a run. Serialized one entry per line as
/// "t<TAB>EVENT<TAB>payload" with t printed to 6 decimals:
///
///   FrameEmitted     16 hex digits of the 8 wire bytes
///   LocationChanged  tag id
///   LocationLost     (empty)
///   Located          location name
class EventLog {
public:
  void append(double time, LogKind kind, std::string payload);

  const std::vector<LogEntry>& entries() const noexcept { return entries_; }
  std::size_t count(LogKind kind) const;

  std::string serialize() const;
  void write(std::ostream& out) const;
  static EventLog parse(std::string_view text);

private:
  std::vector<LogEntry> entries_;
};

/// Fixed account the simulated client logs in with.
inline constexpr std::string_view kSimUser = "sim";
inline constexpr std::string_view kSimPassword = "sim";

/// The whole communication chain for one scenario:
///
///   SimWorld -> serial bytes -> StreamScanner -> Middleware -> ClientCore
///                                                     <-> LocationService
///
/// The server runs in-process and answers within the same tick. Its session
/// clock is the simulation clock.
class Pipeline {
public:
  Pipeline(const Scenario& scenario, Registry registry,
           CredentialStore credentials = {},
           std::optional<std::filesystem::path> assets_dir = std::nullopt);

  /// Advances one dt.
  void step();
  bool finished() const;
  double now() const noexcept { return world_.state().clock; }

  void steer(const SteerCommand& command) { world_.steer(command); }
  void set_logging(bool on) noexcept { logging_ = on; }

  const EventLog& log() const noexcept { return log_; }
  const SimWorld& world() const noexcept { return world_; }
  SimWorld& world() noexcept { return world_; }
  const Middleware& middleware() const noexcept { return middleware_; }
  const ClientCore& client() const noexcept { return client_; }
  LocationService& service() noexcept { return *service_; }
  const ScanDiagnostics& link_diagnostics() const noexcept { return scanner_.diagnostics(); }

private:
  void login();
  void dispatch(const std::vector<OutboundRequest>& requests);
  void record(double time, LogKind kind, std::string payload);

  Scenario scenario_;
  SimWorld world_;
  StreamScanner scanner_;
  Middleware middleware_;
  ClientCore client_;
  std::shared_ptr<double> sim_clock_;
  std::unique_ptr<LocationService> service_;
  EventLog log_;
  bool logging_ = true;
};

/// Loads the scenario's registry (empty when none is named) and runs the
/// pipeline for the scenario's duration.
EventLog run(const Scenario& scenario);

}  // namespace rfidlbs
