#include "rfidlbs/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml++/toml.hpp>

namespace rfidlbs {

namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw ScenarioError(ScenarioErrc::InvalidScenario, msg);
}

[[noreturn]] void parse_fail(const std::string& msg) {
  throw ScenarioError(ScenarioErrc::ParseError, msg);
}

void reject_unknown_keys(const toml::table& table, std::string_view where,
                         std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : table) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key.str() == a;
    if (!ok) parse_fail("unknown key '" + std::string(key.str()) + "' in " + std::string(where));
  }
}

double number(const toml::table& t, std::string_view key, std::string_view where,
              std::optional<double> fallback = std::nullopt) {
  const auto* node = t.get(key);
  if (!node) {
    if (fallback) return *fallback;
    parse_fail(std::string(where) + ": missing '" + std::string(key) + "'");
  }
  const auto v = node->value<double>();
  if (!v) parse_fail(std::string(where) + ": '" + std::string(key) + "' must be a number");
  return *v;
}

const toml::table* sub_table(const toml::table& root, std::string_view key) {
  const auto* node = root.get(key);
  if (!node) return nullptr;
  if (!node->is_table()) parse_fail("'" + std::string(key) + "' must be a table");
  return node->as_table();
}

const toml::array* table_array(const toml::table& root, std::string_view key) {
  const auto* node = root.get(key);
  if (!node) return nullptr;
  if (!node->is_array_of_tables()) parse_fail("'" + std::string(key) + "' must be [[" +
                                              std::string(key) + "]] entries");
  return node->as_array();
}

ScenarioTag parse_tag(const toml::table& t, std::size_t index) {
  const std::string where = "tags[" + std::to_string(index) + "]";
  reject_unknown_keys(t, where, {"id", "x", "y", "class", "power"});

  ScenarioTag tag;
  const auto id_text = t["id"].value<std::string>();
  if (!id_text) parse_fail(where + ": 'id' must be a string of 10 hex characters");
  const auto id = TagId::try_parse(*id_text);
  if (!id) parse_fail(where + ": malformed tag id '" + *id_text + "'");
  tag.id = *id;
  tag.position = {number(t, "x", where), number(t, "y", where)};

  if (const auto* cls = t.get("class")) {
    std::optional<TagClass> parsed;
    if (auto s = cls->value<std::string>()) {
      parsed = parse_tag_class(*s);
    } else if (auto n = cls->value<std::int64_t>(); n && *n >= 0 && *n <= 4) {
      parsed = static_cast<TagClass>(*n);
    }
    if (!parsed) parse_fail(where + ": unknown tag class");
    tag.tag_class = *parsed;
  }
  if (const auto* pw = t.get("power")) {
    const auto s = pw->value<std::string>();
    const auto parsed = s ? parse_tag_power(*s) : std::nullopt;
    if (!parsed) parse_fail(where + ": power must be \"passive\" or \"active\"");
    tag.power = *parsed;
  }
  return tag;
}

}  // namespace

void Scenario::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) invalid("dt must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration)) invalid("duration must be positive");
  if (!(speed >= 0.0) || !std::isfinite(speed)) invalid("speed must be non-negative");

  std::set<TagId> seen;
  for (const auto& t : tags) {
    if (!seen.insert(t.id).second) invalid("duplicate tag id " + t.id.to_string());
    if (!std::isfinite(t.position.x) || !std::isfinite(t.position.y)) {
      invalid("tag " + t.id.to_string() + " has a non-finite position");
    }
  }
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto& w = path[i];
    if (!std::isfinite(w.position.x) || !std::isfinite(w.position.y)) {
      invalid("waypoint " + std::to_string(i) + " has a non-finite position");
    }
    if (!(w.speed >= 0.0) || !std::isfinite(w.speed)) {
      invalid("waypoint " + std::to_string(i) + " has a negative speed");
    }
  }
}

std::uint64_t Scenario::tick_count() const {
  return static_cast<std::uint64_t>(std::llround(duration / dt));
}

Scenario parse_scenario(std::string_view toml_text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML error at line " << e.source().begin.line << ": " << e.description();
    parse_fail(msg.str());
  }
  reject_unknown_keys(root, "scenario", {"sim", "tags", "path", "registry"});

  Scenario sc;
  if (const auto* sim = sub_table(root, "sim")) {
    reject_unknown_keys(*sim, "[sim]", {"seed", "preset", "dt", "duration", "speed"});
    if (const auto* seed = sim->get("seed")) {
      const auto v = seed->value<std::int64_t>();
      if (!v || *v < 0) parse_fail("[sim]: seed must be a non-negative integer");
      sc.seed = static_cast<std::uint64_t>(*v);
    }
    if (const auto* p = sim->get("preset")) {
      const auto s = p->value<std::string>();
      const auto name = s ? parse_preset_name(*s) : std::nullopt;
      if (!name) parse_fail("[sim]: preset must be LF135, HF1356 or UHF900");
      sc.preset = *name;
    }
    sc.dt = number(*sim, "dt", "[sim]", sc.dt);
    sc.duration = number(*sim, "duration", "[sim]", sc.duration);
    sc.speed = number(*sim, "speed", "[sim]", sc.speed);
  }

  if (const auto* tags = table_array(root, "tags")) {
    std::size_t i = 0;
    for (const auto& node : *tags) sc.tags.push_back(parse_tag(*node.as_table(), i++));
  }
  if (const auto* path = table_array(root, "path")) {
    std::size_t i = 0;
    for (const auto& node : *path) {
      const auto& t = *node.as_table();
      const std::string where = "path[" + std::to_string(i++) + "]";
      reject_unknown_keys(t, where, {"x", "y", "speed"});
      sc.path.push_back(Waypoint{{number(t, "x", where), number(t, "y", where)},
                                 number(t, "speed", where, sc.speed)});
    }
  }
  if (const auto* reg = sub_table(root, "registry")) {
    reject_unknown_keys(*reg, "[registry]", {"file"});
    const auto file = (*reg)["file"].value<std::string>();
    if (!file) parse_fail("[registry]: 'file' must be a string");
    std::filesystem::path p(*file);
    sc.registry_file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ScenarioError(ScenarioErrc::Io, "cannot open scenario " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), file.parent_path());
}

}  // namespace rfidlbs
