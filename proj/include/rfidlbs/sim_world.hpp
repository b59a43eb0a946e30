#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <variant>
#include <vector>

#include "rfidlbs/air_interface.hpp"
#include "rfidlbs/reader_link.hpp"
#include "rfidlbs/scenario.hpp"

namespace rfidlbs {

struct SetVelocity {
  double vx = 0.0;
  double vy = 0.0;
};
struct GoTo {
  Point target;
};
struct Stop {};

using SteerCommand = std::variant<SetVelocity, GoTo, Stop>;

enum class MotionMode { FollowPath, Velocity, GoTo, Hold };

struct EmittedFrame {
  double time = 0.0;
  FrameBytes bytes{};
};

struct WorldState {
  std::uint64_t ticks = 0;
  double clock = 0.0;
  Point user_position;
  Point user_velocity;  // displacement of the last tick divided by dt
  std::map<TagId, Tag> tags;
  std::map<TagId, Point> tag_positions;
  std::set<TagId> powered;  // as of the end of the last tick

  MotionMode mode = MotionMode::FollowPath;
  std::size_t next_waypoint = 1;
  Point commanded_velocity;
  Point goto_target;
};

/// Fixed-step simulation of one user carrying a reader through a building.
///
/// Each advance() moves the user by one dt, recomputes which tags are
/// powered, and runs every inventory slot that ends inside the tick. Slots
/// sit on the reader's own grid of 1/slot_rate, independent of dt.
///
/// Steering commands are queued and applied at the start of the next tick.
/// The first command switches the user out of path following for good; Stop
/// and a completed GoTo leave the user holding position.
class SimWorld {
public:
  explicit SimWorld(const Scenario& scenario);

  std::vector<EmittedFrame> advance();
  void steer(const SteerCommand& command);

  /// Direct edit of a tag record (memory writes, kill).
  void update_tag(const Tag& tag);

  const WorldState& state() const noexcept { return state_; }
  const Scenario& scenario() const noexcept { return scenario_; }
  const InventoryReader& reader() const noexcept { return reader_; }
  FieldView field() const;

private:
  void apply_pending();
  void move_user();
  double segment_speed() const;

  Scenario scenario_;
  ReaderPreset preset_;
  WorldState state_;
  InventoryReader reader_;
  Rng rng_;
  std::deque<SteerCommand> pending_;
};

}  // namespace rfidlbs
