#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rfidlbs/tag_model.hpp"

namespace rfidlbs {

/// Random source for everything slot-related. mt19937_64's output sequence
/// is fixed by the standard, so seeded runs reproduce across toolchains.
using Rng = std::mt19937_64;

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b) noexcept;

enum class PresetName { LF135, HF1356, UHF900 };

struct ReaderPreset {
  PresetName name;
  double frequency_hz;
  double read_range_m;
  double slot_rate;  // slots per second

  double slot_time() const noexcept { return 1.0 / slot_rate; }
};

ReaderPreset preset(PresetName name) noexcept;
std::string_view to_string(PresetName name) noexcept;
std::optional<PresetName> parse_preset_name(std::string_view text) noexcept;

/// Active tags carry their own battery and answer from this far regardless
/// of the reader's passive range.
constexpr double kActiveTagRange = 100.0;

struct FieldView {
  Point reader;
  std::map<TagId, Point> tag_positions;
  ReaderPreset preset;
};

class AirError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Tags that can answer the reader right now. Passive tags need to be inside
/// the closed read-range disk; active tags within kActiveTagRange. Killed
/// tags never answer. Throws AirError if a positioned tag has no record.
std::set<TagId> powered_tags(const FieldView& field,
                             const std::map<TagId, Tag>& tags);

/// Outcome of one framed slotted ALOHA frame.
struct RoundResult {
  std::uint32_t slot_count = 0;
  std::vector<TagId> singulated;               // in slot order
  std::vector<std::uint32_t> singulation_slot;  // parallel to singulated
  std::uint32_t collision_slots = 0;
  std::uint32_t empty_slots = 0;
  double elapsed = 0.0;
};

/// Uniform slot index in [0, slot_count).
std::uint32_t draw_slot(Rng& rng, std::uint32_t slot_count);

/// One fixed frame: every powered, non-acknowledged tag picks a slot
/// uniformly; slots with a single responder singulate it.
RoundResult inventory_round(const std::set<TagId>& powered,
                            const std::set<TagId>& acknowledged,
                            std::uint32_t slot_count, double slot_rate, Rng& rng);

/// n (1 - 1/N)^(n-1): expected singulations per frame.
double expected_singulations(std::uint32_t n, std::uint32_t slot_count);

constexpr std::uint32_t kDefaultFrameSlots = 16;

struct SlotPolicy {
  /// Frame size at power-up. The adaptive reader starts with one slot and
  /// grows on collisions; kDefaultFrameSlots is the size used for fixed frames.
  std::uint32_t initial_slots = 1;
  bool adaptive = true;
  std::uint32_t max_slots = 1024;
  /// Seconds an acknowledged tag stays silent before it answers again.
  double ack_persistence = 2.0;

  static SlotPolicy fixed(std::uint32_t slots) {
    return SlotPolicy{slots, false, slots, 1e300};
  }

  /// Doubles on collision_slots > N/2, halves (min 1) on empty_slots > 3N/4.
  std::uint32_t next_frame_size(const RoundResult& finished) const noexcept;
};

struct TimedRead {
  double time = 0.0;
  TagId tag;
  friend bool operator==(const TimedRead&, const TimedRead&) = default;
};

/// Stateful reader that executes frames one slot at a time on a global slot
/// grid: slot k occupies [k/rate, (k+1)/rate) and a singulation in it is
/// stamped (k+1)/rate. The powered set is re-evaluated at every slot, so a
/// tag that walks out of the field mid-frame stops answering.
class InventoryReader {
public:
  InventoryReader(ReaderPreset preset, SlotPolicy policy = {});

  /// Runs the next slot against the tags powered right now.
  std::optional<TimedRead> run_slot(const std::set<TagId>& powered, Rng& rng);

  std::uint64_t slots_run() const noexcept { return slots_run_; }
  /// End time of the last slot run.
  double now() const noexcept;
  std::uint32_t frame_size() const noexcept { return frame_size_; }
  const std::map<TagId, std::uint64_t>& acknowledged() const noexcept {
    return acknowledged_;
  }
  const ReaderPreset& preset() const noexcept { return preset_; }

  /// Forget acknowledgements and restart frame sizing.
  void reset();

private:
  void start_frame(const std::set<TagId>& powered, Rng& rng);

  ReaderPreset preset_;
  SlotPolicy policy_;
  std::uint64_t slots_run_ = 0;
  std::uint32_t frame_size_;
  std::uint32_t slot_in_frame_ = 0;
  bool frame_open_ = false;
  std::vector<std::vector<TagId>> responders_;  // per slot of the open frame
  RoundResult frame_stats_;
  std::set<TagId> frame_powered_;
  std::optional<std::set<TagId>> last_frame_powered_;
  std::map<TagId, std::uint64_t> acknowledged_;  // tag -> slot index of the ack
};

/// Runs frames over a static field until `duration` is used up. Never runs a
/// slot that would end after `duration`.
std::vector<TimedRead> run_inventory(const FieldView& field,
                                     const std::map<TagId, Tag>& tags,
                                     double duration, const SlotPolicy& policy,
                                     Rng& rng);

}  // namespace rfidlbs
