#include "rfidlbs/air_interface.hpp"

#include <algorithm>
#include <cmath>

namespace rfidlbs {

double distance(Point a, Point b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

ReaderPreset preset(PresetName name) noexcept {
  switch (name) {
    case PresetName::LF135: return {name, 135e3, 0.15, 50.0};
    case PresetName::HF1356: return {name, 13.56e6, 0.20, 50.0};
    case PresetName::UHF900: return {name, 915e6, 3.0, 400.0};
  }
  return {PresetName::HF1356, 13.56e6, 0.20, 50.0};
}

std::string_view to_string(PresetName name) noexcept {
  switch (name) {
    case PresetName::LF135: return "LF135";
    case PresetName::HF1356: return "HF1356";
    case PresetName::UHF900: return "UHF900";
  }
  return "?";
}

std::optional<PresetName> parse_preset_name(std::string_view text) noexcept {
  for (auto n : {PresetName::LF135, PresetName::HF1356, PresetName::UHF900}) {
    if (text == to_string(n)) return n;
  }
  return std::nullopt;
}

std::set<TagId> powered_tags(const FieldView& field,
                             const std::map<TagId, Tag>& tags) {
  std::set<TagId> out;
  for (const auto& [id, pos] : field.tag_positions) {
    const auto it = tags.find(id);
    if (it == tags.end()) {
      throw AirError("tag " + id.to_string() + " has a position but no record");
    }
    const Tag& tag = it->second;
    if (tag.killed) continue;
    const double range = tag.power == TagPower::Active ? kActiveTagRange
                                                       : field.preset.read_range_m;
    if (distance(field.reader, pos) <= range) out.insert(id);
  }
  return out;
}

std::uint32_t draw_slot(Rng& rng, std::uint32_t slot_count) {
  // Multiply-shift maps a 64-bit draw onto [0, slot_count).
  const auto wide = static_cast<unsigned __int128>(rng()) * slot_count;
  return static_cast<std::uint32_t>(wide >> 64);
}

RoundResult inventory_round(const std::set<TagId>& powered,
                            const std::set<TagId>& acknowledged,
                            std::uint32_t slot_count, double slot_rate, Rng& rng) {
  if (slot_count == 0) throw std::invalid_argument("slot_count must be >= 1");

  std::vector<std::vector<TagId>> slots(slot_count);
  for (TagId id : powered) {
    if (acknowledged.contains(id)) continue;
    slots[draw_slot(rng, slot_count)].push_back(id);
  }

  RoundResult r;
  r.slot_count = slot_count;
  r.elapsed = slot_count / slot_rate;
  for (std::uint32_t k = 0; k < slot_count; ++k) {
    switch (slots[k].size()) {
      case 0: ++r.empty_slots; break;
      case 1:
        r.singulated.push_back(slots[k].front());
        r.singulation_slot.push_back(k);
        break;
      default: ++r.collision_slots; break;
    }
  }
  return r;
}

double expected_singulations(std::uint32_t n, std::uint32_t slot_count) {
  if (slot_count == 0) throw std::invalid_argument("slot_count must be >= 1");
  if (n == 0) return 0.0;
  return n * std::pow(1.0 - 1.0 / slot_count, static_cast<double>(n) - 1.0);
}

std::uint32_t SlotPolicy::next_frame_size(const RoundResult& finished) const noexcept {
  const std::uint32_t n = finished.slot_count;
  std::uint32_t next = n;
  if (2 * finished.collision_slots > n) {
    next = n * 2;
  } else if (4 * finished.empty_slots > 3 * n) {
    next = std::max<std::uint32_t>(1, n / 2);
  }
  return std::clamp<std::uint32_t>(next, 1, std::max<std::uint32_t>(1, max_slots));
}

InventoryReader::InventoryReader(ReaderPreset preset, SlotPolicy policy)
    : preset_(preset),
      policy_(policy),
      frame_size_(std::max<std::uint32_t>(1, policy.initial_slots)) {}

double InventoryReader::now() const noexcept {
  return static_cast<double>(slots_run_) / preset_.slot_rate;
}

void InventoryReader::reset() {
  acknowledged_.clear();
  last_frame_powered_.reset();
  frame_open_ = false;
  frame_size_ = std::max<std::uint32_t>(1, policy_.initial_slots);
}

void InventoryReader::start_frame(const std::set<TagId>& powered, Rng& rng) {
  const double rate = preset_.slot_rate;
  std::erase_if(acknowledged_, [&](const auto& entry) {
    return static_cast<double>(slots_run_ - entry.second) / rate >=
           policy_.ack_persistence;
  });
  if (last_frame_powered_ && *last_frame_powered_ != powered) {
    acknowledged_.clear();
  }
  last_frame_powered_ = powered;

  responders_.assign(frame_size_, {});
  for (TagId id : powered) {
    if (acknowledged_.contains(id)) continue;
    responders_[draw_slot(rng, frame_size_)].push_back(id);
  }
  frame_stats_ = RoundResult{};
  frame_stats_.slot_count = frame_size_;
  frame_stats_.elapsed = frame_size_ / rate;
  slot_in_frame_ = 0;
  frame_open_ = true;
}

std::optional<TimedRead> InventoryReader::run_slot(const std::set<TagId>& powered,
                                                   Rng& rng) {
  if (!frame_open_) start_frame(powered, rng);

  auto& slot = responders_[slot_in_frame_];
  std::erase_if(slot, [&](TagId id) { return !powered.contains(id); });

  const std::uint64_t k = slots_run_;
  std::optional<TimedRead> read;
  if (slot.empty()) {
    ++frame_stats_.empty_slots;
  } else if (slot.size() == 1) {
    const TagId id = slot.front();
    acknowledged_[id] = k;
    frame_stats_.singulated.push_back(id);
    frame_stats_.singulation_slot.push_back(slot_in_frame_);
    read = TimedRead{static_cast<double>(k + 1) / preset_.slot_rate, id};
  } else {
    ++frame_stats_.collision_slots;
  }

  ++slots_run_;
  if (++slot_in_frame_ == frame_size_) {
    frame_open_ = false;
    if (policy_.adaptive) frame_size_ = policy_.next_frame_size(frame_stats_);
  }
  return read;
}

std::vector<TimedRead> run_inventory(const FieldView& field,
                                     const std::map<TagId, Tag>& tags,
                                     double duration, const SlotPolicy& policy,
                                     Rng& rng) {
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
  const auto powered = powered_tags(field, tags);
  const auto total_slots =
      static_cast<std::uint64_t>(std::floor(duration * field.preset.slot_rate + 1e-9));

  std::vector<TimedRead> reads;
  InventoryReader reader(field.preset, policy);
  for (std::uint64_t i = 0; i < total_slots; ++i) {
    if (auto r = reader.run_slot(powered, rng)) reads.push_back(*r);
  }
  return reads;
}

}  // namespace rfidlbs
