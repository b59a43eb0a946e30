#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rfidlbs/middleware.hpp"
#include "rfidlbs/registry.hpp"

namespace rfidlbs {

enum class ClientPhase { LoggedOut, Authenticating, Unknown, Resolving, Located };

std::string_view to_string(ClientPhase phase) noexcept;

/// Time advances; the value is what the middleware reports as current at
/// `now`, read only if the tick falls on a poll.
struct Tick {
  double now = 0.0;
  std::optional<TagId> middleware_current;
};

struct MiddlewareNotice {
  LocationEvent event;
};

enum class RequestKind { Login, Locate };

struct ServerResponse {
  RequestKind kind = RequestKind::Locate;
  int status = 0;
  std::string body;
  double now = 0.0;
  std::optional<TagId> tag;  // the tag a Locate response answers
};

using ClientInput = std::variant<Tick, MiddlewareNotice, ServerResponse>;

struct OutboundRequest {
  RequestKind kind = RequestKind::Locate;
  std::string method;
  std::string target;  // path plus query
  std::string body;
  std::optional<std::string> session;  // sent as X-Session
  std::optional<TagId> tag;
};

struct ClientState {
  ClientPhase phase = ClientPhase::LoggedOut;
  std::optional<TagId> tag;               // Resolving / Located tag
  std::optional<LocationRecord> record;   // Located only
  std::optional<std::string> session;
  std::string server_address;
  double poll_period = 2.0;
  double next_poll_at = 0.0;

  std::optional<TagId> unresolved;  // answered 404 or gave up; not re-queried
  double locate_sent_at = 0.0;
  int locate_attempts = 0;
  std::optional<std::string> note;  // last user-facing error
};

class ClientError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The mobile client as a pure state machine: all I/O enters through step()
/// and leaves as OutboundRequests, so it runs the same against an in-process
/// server or a socket.
///
/// The client polls the middleware every poll_period and only talks to the
/// server when the polled tag changes. While Resolving, at most one /locate
/// is in flight; after 3 poll periods without an answer it is sent once more,
/// then the client gives up and shows Unknown.
class ClientCore {
public:
  static constexpr int kLocateRetryPeriods = 3;

  explicit ClientCore(double poll_period = 2.0);

  /// Throws ClientError unless LoggedOut.
  OutboundRequest begin_login(std::string_view username, std::string_view password,
                              std::string_view server_address);

  std::vector<OutboundRequest> step(const ClientInput& input);

  const ClientState& state() const noexcept { return state_; }
  ClientPhase phase() const noexcept { return state_.phase; }

private:
  std::vector<OutboundRequest> on_tick(const Tick& tick);
  std::vector<OutboundRequest> on_notice(const MiddlewareNotice& notice);
  std::vector<OutboundRequest> on_response(const ServerResponse& response);
  OutboundRequest locate_request(TagId tag) const;
  void to_unknown();

  ClientState state_;
};

}  // namespace rfidlbs
