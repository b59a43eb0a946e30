#include "rfidlbs/pipeline.hpp"

#include <cstdio>
#include <ostream>

namespace rfidlbs {

std::string_view to_string(LogKind kind) noexcept {
  switch (kind) {
    case LogKind::FrameEmitted: return "FrameEmitted";
    case LogKind::LocationChanged: return "LocationChanged";
    case LogKind::LocationLost: return "LocationLost";
    case LogKind::Located: return "Located";
  }
  return "?";
}

void EventLog::append(double time, LogKind kind, std::string payload) {
  for (char& c : payload) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  entries_.push_back(LogEntry{time, kind, std::move(payload)});
}

std::size_t EventLog::count(LogKind kind) const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.kind == kind;
  return n;
}

void EventLog::write(std::ostream& out) const { out << serialize(); }

std::string EventLog::serialize() const {
  std::string out;
  char stamp[32];
  for (const auto& e : entries_) {
    std::snprintf(stamp, sizeof stamp, "%.6f", e.time);
    out += stamp;
    out += '\t';
    out += to_string(e.kind);
    out += '\t';
    out += e.payload;
    out += '\n';
  }
  return out;
}

EventLog EventLog::parse(std::string_view text) {
  EventLog log;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;

    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) {
      throw std::runtime_error("event log line " + std::to_string(line_no) +
                               ": expected t<TAB>EVENT<TAB>payload");
    }
    const auto kind_text = line.substr(t1 + 1, t2 - t1 - 1);
    std::optional<LogKind> kind;
    for (auto k : {LogKind::FrameEmitted, LogKind::LocationChanged, LogKind::LocationLost,
                   LogKind::Located}) {
      if (kind_text == to_string(k)) kind = k;
    }
    if (!kind) {
      throw std::runtime_error("event log line " + std::to_string(line_no) +
                               ": unknown event '" + std::string(kind_text) + "'");
    }
    log.entries_.push_back(LogEntry{std::stod(std::string(line.substr(0, t1))), *kind,
                                    std::string(line.substr(t2 + 1))});
  }
  return log;
}

namespace {

HttpRequest to_http(const OutboundRequest& req) {
  HttpRequest out;
  out.method = req.method;
  out.body = req.body;
  const auto q = req.target.find('?');
  out.path = req.target.substr(0, q);
  if (q != std::string::npos) {
    std::string_view query(req.target);
    query.remove_prefix(q + 1);
    while (!query.empty()) {
      const auto amp = query.find('&');
      const auto pair = query.substr(0, amp);
      const auto eq = pair.find('=');
      out.query.emplace(std::string(pair.substr(0, eq)),
                        eq == std::string_view::npos ? "" : std::string(pair.substr(eq + 1)));
      query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
    }
  }
  if (req.session) out.headers.emplace("x-session", *req.session);
  return out;
}

}  // namespace

Pipeline::Pipeline(const Scenario& scenario, Registry registry, CredentialStore credentials,
                   std::optional<std::filesystem::path> assets_dir)
    : scenario_(scenario),
      world_(scenario),
      client_(2.0),
      sim_clock_(std::make_shared<double>(0.0)) {
  // Fixed salt keeps runs reproducible; the token itself never reaches the log.
  credentials.set_password(std::string(kSimUser), kSimPassword,
                           std::vector<std::uint8_t>(16, 0x5A));
  service_ = std::make_unique<LocationService>(
      std::move(registry), std::move(credentials), std::move(assets_dir),
      [clock = sim_clock_] { return *clock; });
  login();
  dispatch(client_.step(Tick{now(), middleware_.current_tag()}));
}

void Pipeline::record(double time, LogKind kind, std::string payload) {
  if (logging_) log_.append(time, kind, std::move(payload));
}

void Pipeline::login() {
  dispatch({client_.begin_login(kSimUser, kSimPassword, "in-process")});
}

void Pipeline::dispatch(const std::vector<OutboundRequest>& requests) {
  for (const auto& req : requests) {
    const auto before_phase = client_.phase();
    const auto before_tag = client_.state().tag;

    const HttpResponse res = service_->handle(to_http(req));
    client_.step(ServerResponse{req.kind, res.status, res.body, now(), req.tag});

    const auto& s = client_.state();
    if (s.phase == ClientPhase::Located &&
        (before_phase != ClientPhase::Located || before_tag != s.tag)) {
      record(now(), LogKind::Located, s.record->name);
    }
  }
}

bool Pipeline::finished() const {
  return world_.state().ticks >= scenario_.tick_count();
}

void Pipeline::step() {
  const auto frames = world_.advance();
  *sim_clock_ = now();

  for (const auto& frame : frames) {
    record(frame.time, LogKind::FrameEmitted, to_hex(frame.bytes));
    for (const auto& report : scanner_.feed(frame.bytes, frame.time)) {
      if (auto ev = middleware_.ingest(report, report.timestamp)) {
        record(ev->at, LogKind::LocationChanged, ev->tag->to_string());
        client_.step(MiddlewareNotice{*ev});
      }
    }
  }
  if (auto ev = middleware_.poll_lost(now())) {
    record(ev->at, LogKind::LocationLost, "");
    client_.step(MiddlewareNotice{*ev});
  }

  // A session that idled out drops the client to LoggedOut; sign back in.
  if (client_.phase() == ClientPhase::LoggedOut) login();
  dispatch(client_.step(Tick{now(), middleware_.current_tag()}));
}

EventLog run(const Scenario& scenario) {
  Registry registry;
  if (scenario.registry_file) registry = load_registry(*scenario.registry_file);
  Pipeline pipeline(scenario, std::move(registry));
  while (!pipeline.finished()) pipeline.step();
  return pipeline.log();
}

}  // namespace rfidlbs
