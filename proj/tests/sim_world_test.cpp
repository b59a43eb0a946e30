#include <gtest/gtest.h>

#include <cmath>

#include "rfidlbs/sim_world.hpp"

using namespace rfidlbs;

namespace {

Scenario base(PresetName preset = PresetName::HF1356) {
  Scenario s;
  s.seed = 11;
  s.preset = preset;
  s.path = {Waypoint{{0, 0}, 1.0}};
  return s;
}

std::vector<EmittedFrame> run_for(SimWorld& w, std::uint64_t ticks) {
  std::vector<EmittedFrame> all;
  for (std::uint64_t i = 0; i < ticks; ++i) {
    auto f = w.advance();
    all.insert(all.end(), f.begin(), f.end());
  }
  return all;
}

}  // namespace

TEST(SimWorld, OutOfRangeTagIsNeverRead) {
  auto s = base();
  s.tags = {ScenarioTag{TagId(1), {0.25, 0}}};
  SimWorld w(s);
  EXPECT_TRUE(run_for(w, 2000).empty());
  EXPECT_TRUE(w.state().powered.empty());
}

TEST(SimWorld, StationaryLfTagIsReadQuickly) {
  auto s = base(PresetName::LF135);
  s.tags = {ScenarioTag{TagId(0x110055B53A), {0.10, 0}}};
  SimWorld w(s);
  const auto frames = run_for(w, 100);
  ASSERT_FALSE(frames.empty());
  EXPECT_LT(frames.front().time, 0.1);
  EXPECT_EQ(decode_frame(frames.front().bytes).tag_id, TagId(0x110055B53A));
  // Acknowledgement expiry keeps a stationary tag being re-read.
  EXPECT_GE(frames.size(), 1u);
  const auto later = run_for(w, 400);
  EXPECT_FALSE(later.empty());
}

TEST(SimWorld, FrameTimesSitOnTheSlotGrid) {
  auto s = base(PresetName::UHF900);
  for (int i = 0; i < 5; ++i) s.tags.push_back({TagId(100 + i), {0.5 * i, 0.3}});
  SimWorld w(s);
  const auto frames = run_for(w, 300);
  ASSERT_FALSE(frames.empty());
  double prev = 0;
  for (const auto& f : frames) {
    const double k = f.time * 400.0;
    EXPECT_NEAR(k, std::round(k), 1e-6);
    EXPECT_GT(f.time, prev);
    prev = f.time;
  }
  EXPECT_EQ(w.reader().slots_run(), 1200u);
}

TEST(SimWorld, Deterministic) {
  auto s = base(PresetName::UHF900);
  for (int i = 0; i < 20; ++i) s.tags.push_back({TagId(1 + i), {0.1 * i, 0.2}});
  SimWorld a(s), b(s);
  const auto fa = run_for(a, 500);
  const auto fb = run_for(b, 500);
  ASSERT_EQ(fa.size(), fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    EXPECT_EQ(fa[i].time, fb[i].time);
    EXPECT_EQ(fa[i].bytes, fb[i].bytes);
  }
  s.seed = 12;
  SimWorld c(s);
  const auto fc = run_for(c, 500);
  bool differs = fc.size() != fa.size();
  for (std::size_t i = 0; !differs && i < fa.size(); ++i) differs = fa[i].bytes != fc[i].bytes;
  EXPECT_TRUE(differs);
}

TEST(SimWorld, FollowsPathAtWaypointSpeed) {
  auto s = base();
  s.path = {Waypoint{{0, 0}, 1.0}, Waypoint{{3, 4}, 2.0}};
  SimWorld w(s);
  run_for(w, 100);  // 1 s at 2 m/s
  EXPECT_NEAR(w.state().user_position.x, 1.2, 1e-9);
  EXPECT_NEAR(w.state().user_position.y, 1.6, 1e-9);
  run_for(w, 200);  // arrives at t = 2.5 and stays
  EXPECT_DOUBLE_EQ(w.state().user_position.x, 3.0);
  EXPECT_DOUBLE_EQ(w.state().user_position.y, 4.0);
}

TEST(SimWorld, SetVelocityMovesExactly) {
  SimWorld w(base());
  w.steer(SetVelocity{1.0, 0.0});
  run_for(w, 200);
  EXPECT_NEAR(w.state().user_position.x, 2.0, 1e-9);
  EXPECT_NEAR(w.state().user_position.y, 0.0, 1e-12);
  EXPECT_EQ(w.state().mode, MotionMode::Velocity);
}

TEST(SimWorld, StopHolds) {
  SimWorld w(base());
  w.steer(SetVelocity{0.0, 1.0});
  run_for(w, 50);
  w.steer(Stop{});
  run_for(w, 1);
  const auto held = w.state().user_position;
  run_for(w, 100);
  EXPECT_EQ(w.state().user_position.x, held.x);
  EXPECT_EQ(w.state().user_position.y, held.y);
  EXPECT_EQ(w.state().mode, MotionMode::Hold);
}

TEST(SimWorld, GoToArrivesWithinOneStep) {
  auto s = base();
  s.speed = 1.5;
  SimWorld w(s);
  w.steer(GoTo{{2.0, -1.0}});
  for (int i = 0; i < 300; ++i) {
    const auto before = w.state().user_position;
    w.advance();
    const auto& p = w.state().user_position;
    // Never faster than the walking speed.
    ASSERT_LE(distance(before, p), s.dt * s.speed + 1e-12);
  }
  EXPECT_LE(distance(w.state().user_position, Point{2.0, -1.0}), s.dt * s.speed);
  EXPECT_EQ(w.state().mode, MotionMode::Hold);
}

TEST(SimWorld, KilledTagGoesSilent) {
  auto s = base(PresetName::LF135);
  s.tags = {ScenarioTag{TagId(5), {0.05, 0}}};
  SimWorld w(s);
  EXPECT_FALSE(run_for(w, 50).empty());
  auto tag = w.state().tags.at(TagId(5));
  w.update_tag(rfidlbs::kill(tag, 0));
  EXPECT_TRUE(run_for(w, 1000).empty());
}

TEST(SimWorld, ClockIsTicksTimesDt) {
  SimWorld w(base());
  run_for(w, 1234);
  EXPECT_EQ(w.state().ticks, 1234u);
  EXPECT_DOUBLE_EQ(w.state().clock, 1234 * 0.01);
}
