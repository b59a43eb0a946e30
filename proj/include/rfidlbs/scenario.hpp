#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rfidlbs/air_interface.hpp"
#include "rfidlbs/tag_model.hpp"

namespace rfidlbs {

struct ScenarioTag {
  TagId id;
  Point position;
  TagClass tag_class = TagClass::Class0;
  TagPower power = TagPower::Passive;
};

struct Waypoint {
  Point position;
  double speed = 1.0;  // m/s on the segment that ends here
};

/// Declarative simulation input.
///
///   [sim]      seed, preset ("LF135"|"HF1356"|"UHF900"), dt, duration, speed
///   [[tags]]   id, x, y, class ("class0".."class4" or 0..4), power
///   [[path]]   x, y, speed (defaults to sim.speed)
///   [registry] file (relative to the scenario file)
///
/// The user starts at the first waypoint.
struct Scenario {
  std::uint64_t seed = 0;
  PresetName preset = PresetName::HF1356;
  double dt = 0.01;
  double duration = 10.0;
  double speed = 1.0;  // default walking speed, also used by GoTo steering
  std::vector<ScenarioTag> tags;
  std::vector<Waypoint> path;
  std::optional<std::filesystem::path> registry_file;

  /// Throws ScenarioError(InvalidScenario).
  void validate() const;
  std::uint64_t tick_count() const;
};

enum class ScenarioErrc { ParseError, InvalidScenario, Io };

class ScenarioError : public std::runtime_error {
public:
  ScenarioError(ScenarioErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ScenarioErrc code() const noexcept { return code_; }

private:
  ScenarioErrc code_;
};

/// Relative registry paths are resolved against base_dir.
Scenario parse_scenario(std::string_view toml_text,
                        const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& file);

}  // namespace rfidlbs
