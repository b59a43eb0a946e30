#include "rfidlbs/middleware.hpp"

#include <algorithm>

namespace rfidlbs {

std::optional<LocationEvent> Middleware::ingest(const TagReportFrame& report,
                                                double now) {
  if (current_ && current_->tag == report.tag_id) {
    if (now - current_->last_seen <= config_.dedup_window) {
      ++suppressed_in_window_;
    } else {
      ++refreshed_;
    }
    current_->last_seen = std::max(current_->last_seen, now);
    return std::nullopt;
  }
  const double seen = current_ ? std::max(current_->last_seen, now) : now;
  current_ = Current{report.tag_id, seen};
  return LocationEvent::changed(report.tag_id, now);
}

std::optional<LocationEvent> Middleware::poll_lost(double now) {
  if (!current_ || now - current_->last_seen <= config_.lost_timeout) {
    return std::nullopt;
  }
  current_.reset();
  return LocationEvent::lost(now);
}

}  // namespace rfidlbs
