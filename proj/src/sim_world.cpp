#include "rfidlbs/sim_world.hpp"

#include <cmath>

namespace rfidlbs {

namespace {

// Moves `from` toward `to` by at most `step`; true when it arrived.
bool step_toward(Point& from, Point to, double step) {
  const double d = distance(from, to);
  if (d <= step) {
    from = to;
    return true;
  }
  from.x += (to.x - from.x) / d * step;
  from.y += (to.y - from.y) / d * step;
  return false;
}

}  // namespace

SimWorld::SimWorld(const Scenario& scenario)
    : scenario_(scenario),
      preset_(preset(scenario.preset)),
      reader_(preset_, SlotPolicy{}),
      rng_(scenario.seed) {
  scenario_.validate();
  for (const auto& t : scenario_.tags) {
    state_.tags.emplace(t.id, Tag::manufacture(t.id, t.tag_class, t.power));
    state_.tag_positions.emplace(t.id, t.position);
  }
  if (!scenario_.path.empty()) state_.user_position = scenario_.path.front().position;
  state_.powered = powered_tags(field(), state_.tags);
}

FieldView SimWorld::field() const {
  return FieldView{state_.user_position, state_.tag_positions, preset_};
}

void SimWorld::steer(const SteerCommand& command) { pending_.push_back(command); }

void SimWorld::update_tag(const Tag& tag) {
  const auto it = state_.tags.find(tag.id);
  if (it == state_.tags.end()) throw AirError("unknown tag " + tag.id.to_string());
  it->second = tag;
}

void SimWorld::apply_pending() {
  while (!pending_.empty()) {
    std::visit(
        [this](const auto& cmd) {
          using T = std::decay_t<decltype(cmd)>;
          if constexpr (std::is_same_v<T, SetVelocity>) {
            state_.mode = MotionMode::Velocity;
            state_.commanded_velocity = {cmd.vx, cmd.vy};
          } else if constexpr (std::is_same_v<T, GoTo>) {
            state_.mode = MotionMode::GoTo;
            state_.goto_target = cmd.target;
          } else {
            state_.mode = MotionMode::Hold;
            state_.commanded_velocity = {};
          }
        },
        pending_.front());
    pending_.pop_front();
  }
}

double SimWorld::segment_speed() const {
  return scenario_.path[state_.next_waypoint].speed;
}

void SimWorld::move_user() {
  const double dt = scenario_.dt;
  Point& pos = state_.user_position;
  switch (state_.mode) {
    case MotionMode::FollowPath:
      if (state_.next_waypoint < scenario_.path.size()) {
        const Point target = scenario_.path[state_.next_waypoint].position;
        if (step_toward(pos, target, segment_speed() * dt)) ++state_.next_waypoint;
      }
      break;
    case MotionMode::Velocity:
      pos.x += state_.commanded_velocity.x * dt;
      pos.y += state_.commanded_velocity.y * dt;
      break;
    case MotionMode::GoTo:
      if (step_toward(pos, state_.goto_target, scenario_.speed * dt)) {
        state_.mode = MotionMode::Hold;
      }
      break;
    case MotionMode::Hold:
      break;
  }
}

std::vector<EmittedFrame> SimWorld::advance() {
  apply_pending();

  const Point before = state_.user_position;
  move_user();
  state_.user_velocity = {(state_.user_position.x - before.x) / scenario_.dt,
                          (state_.user_position.y - before.y) / scenario_.dt};

  ++state_.ticks;
  state_.clock = static_cast<double>(state_.ticks) * scenario_.dt;
  state_.powered = powered_tags(field(), state_.tags);

  std::vector<EmittedFrame> frames;
  const auto slots_due =
      static_cast<std::uint64_t>(std::floor(state_.clock * preset_.slot_rate + 1e-9));
  while (reader_.slots_run() < slots_due) {
    if (const auto read = reader_.run_slot(state_.powered, rng_)) {
      frames.push_back(EmittedFrame{read->time, encode_frame(read->tag)});
    }
  }
  return frames;
}

}  // namespace rfidlbs
