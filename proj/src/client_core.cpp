#include "rfidlbs/client_core.hpp"

#include <json.hpp>

namespace rfidlbs {

namespace {
// Simulated clocks are sums of binary fractions; compare with slack.
constexpr double kTimeEps = 1e-9;
}  // namespace

std::string_view to_string(ClientPhase phase) noexcept {
  switch (phase) {
    case ClientPhase::LoggedOut: return "LoggedOut";
    case ClientPhase::Authenticating: return "Authenticating";
    case ClientPhase::Unknown: return "Unknown";
    case ClientPhase::Resolving: return "Resolving";
    case ClientPhase::Located: return "Located";
  }
  return "?";
}

ClientCore::ClientCore(double poll_period) {
  if (!(poll_period > 0.0)) throw ClientError("poll period must be positive");
  state_.poll_period = poll_period;
}

OutboundRequest ClientCore::begin_login(std::string_view username,
                                        std::string_view password,
                                        std::string_view server_address) {
  if (state_.phase != ClientPhase::LoggedOut) {
    throw ClientError("login requested in phase " + std::string(to_string(state_.phase)));
  }
  state_.phase = ClientPhase::Authenticating;
  state_.server_address = server_address;
  state_.note.reset();

  OutboundRequest req;
  req.kind = RequestKind::Login;
  req.method = "POST";
  req.target = "/login";
  req.body = nlohmann::json{{"username", username}, {"password", password}}.dump();
  return req;
}

std::vector<OutboundRequest> ClientCore::step(const ClientInput& input) {
  return std::visit(
      [this](const auto& in) -> std::vector<OutboundRequest> {
        using T = std::decay_t<decltype(in)>;
        if constexpr (std::is_same_v<T, Tick>) return on_tick(in);
        else if constexpr (std::is_same_v<T, MiddlewareNotice>) return on_notice(in);
        else return on_response(in);
      },
      input);
}

OutboundRequest ClientCore::locate_request(TagId tag) const {
  OutboundRequest req;
  req.kind = RequestKind::Locate;
  req.method = "GET";
  req.target = "/locate?tag=" + tag.to_string();
  req.session = state_.session;
  req.tag = tag;
  return req;
}

void ClientCore::to_unknown() {
  state_.phase = ClientPhase::Unknown;
  state_.tag.reset();
  state_.record.reset();
  state_.locate_attempts = 0;
}

std::vector<OutboundRequest> ClientCore::on_tick(const Tick& tick) {
  std::vector<OutboundRequest> out;
  auto& s = state_;
  if (s.phase == ClientPhase::LoggedOut || s.phase == ClientPhase::Authenticating) {
    return out;
  }

  bool sent_now = false;
  if (tick.now + kTimeEps >= s.next_poll_at) {
    s.next_poll_at += s.poll_period;
    const auto& polled = tick.middleware_current;
    if (!polled) {
      s.unresolved.reset();
      if (s.phase != ClientPhase::Unknown) to_unknown();
    } else if (s.tag == polled) {
      // Same place, or its lookup is still in flight.
    } else if (s.phase == ClientPhase::Unknown && s.unresolved == polled) {
      // Known to be unregistered; wait for the tag to change.
    } else {
      s.phase = ClientPhase::Resolving;
      s.tag = *polled;
      s.record.reset();
      s.unresolved.reset();
      s.locate_attempts = 1;
      s.locate_sent_at = tick.now;
      out.push_back(locate_request(*polled));
      sent_now = true;
    }
  }

  if (!sent_now && s.phase == ClientPhase::Resolving &&
      tick.now - s.locate_sent_at + kTimeEps >= kLocateRetryPeriods * s.poll_period) {
    if (s.locate_attempts < 2) {
      ++s.locate_attempts;
      s.locate_sent_at = tick.now;
      out.push_back(locate_request(*s.tag));
    } else {
      s.unresolved = s.tag;
      s.note = "location lookup timed out";
      to_unknown();
    }
  }
  return out;
}

std::vector<OutboundRequest> ClientCore::on_notice(const MiddlewareNotice& notice) {
  if (notice.event.kind == LocationEvent::Kind::Lost &&
      (state_.phase == ClientPhase::Located || state_.phase == ClientPhase::Resolving)) {
    state_.unresolved.reset();
    to_unknown();
  }
  return {};
}

std::vector<OutboundRequest> ClientCore::on_response(const ServerResponse& response) {
  auto& s = state_;
  if (response.kind == RequestKind::Login) {
    if (s.phase != ClientPhase::Authenticating) return {};
    if (response.status == 200) {
      const auto body = nlohmann::json::parse(response.body, nullptr, false);
      if (!body.is_discarded() && body.contains("token") && body["token"].is_string()) {
        s.session = body["token"].get<std::string>();
        s.phase = ClientPhase::Unknown;
        s.next_poll_at = response.now;
        s.note.reset();
        return {};
      }
      s.note = "malformed login response";
    } else {
      s.note = response.status == 401 ? "authentication failed"
                                      : "login failed with status " + std::to_string(response.status);
    }
    s.phase = ClientPhase::LoggedOut;
    s.session.reset();
    return {};
  }

  if (s.phase != ClientPhase::Resolving || response.tag != s.tag) return {};  // stale

  switch (response.status) {
    case 200: {
      const auto body = nlohmann::json::parse(response.body, nullptr, false);
      try {
        auto record = LocationRecord::from_json(body);
        if (record.tag != *s.tag) throw ClientError("record for another tag");
        s.phase = ClientPhase::Located;
        s.record = std::move(record);
        s.locate_attempts = 0;
        s.note.reset();
      } catch (const std::exception&) {
        s.note = "malformed location record";
        to_unknown();
      }
      break;
    }
    case 404:
      s.unresolved = s.tag;
      to_unknown();
      break;
    case 401:
      s.phase = ClientPhase::LoggedOut;
      s.session.reset();
      s.tag.reset();
      s.record.reset();
      s.unresolved.reset();
      s.locate_attempts = 0;
      s.note = "session expired";
      break;
    default:
      s.note = "location lookup failed with status " + std::to_string(response.status);
      to_unknown();
      break;
  }
  return {};
}

}  // namespace rfidlbs
