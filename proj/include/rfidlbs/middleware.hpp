#pragma once

#include <cstdint>
#include <optional>

#include "rfidlbs/reader_link.hpp"
#include "rfidlbs/tag_model.hpp"

namespace rfidlbs {

struct MiddlewareConfig {
  double dedup_window = 1.0;
  double lost_timeout = 5.0;
};

struct LocationEvent {
  enum class Kind { Changed, Lost };
  Kind kind = Kind::Changed;
  std::optional<TagId> tag;  // set for Changed
  double at = 0.0;

  static LocationEvent changed(TagId id, double at) { return {Kind::Changed, id, at}; }
  static LocationEvent lost(double at) { return {Kind::Lost, std::nullopt, at}; }
  friend bool operator==(const LocationEvent&, const LocationEvent&) = default;
};

/// Turns the raw read stream into "the user is now at tag X" events.
///
/// A report for the tag already current never produces an event; it only
/// refreshes last_seen. Alternating reports of two tags produce a Changed on
/// every alternation. The current tag is dropped with a Lost event once it
/// has not been seen for longer than lost_timeout.
class Middleware {
public:
  struct Current {
    TagId tag;
    double last_seen = 0.0;
  };

  explicit Middleware(MiddlewareConfig config = {}) : config_(config) {}

  std::optional<LocationEvent> ingest(const TagReportFrame& report, double now);
  std::optional<LocationEvent> poll_lost(double now);

  /// Pull interface for clients that poll.
  std::optional<TagId> current_tag() const noexcept {
    return current_ ? std::optional(current_->tag) : std::nullopt;
  }
  const std::optional<Current>& current() const noexcept { return current_; }
  const MiddlewareConfig& config() const noexcept { return config_; }

  std::uint64_t suppressed_in_window() const noexcept { return suppressed_in_window_; }
  std::uint64_t refreshed() const noexcept { return refreshed_; }

private:
  MiddlewareConfig config_;
  std::optional<Current> current_;
  std::uint64_t suppressed_in_window_ = 0;
  std::uint64_t refreshed_ = 0;
};

}  // namespace rfidlbs
