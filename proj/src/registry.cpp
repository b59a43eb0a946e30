#include "rfidlbs/registry.hpp"

#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace rfidlbs {

nlohmann::json LocationRecord::to_json() const {
  nlohmann::json j;
  j["tag"] = tag.to_string();
  j["name"] = name;
  j["description"] = description;
  j["image"] = image_ref ? nlohmann::json(*image_ref) : nlohmann::json(nullptr);
  j["extras"] = nlohmann::json::object();
  for (const auto& [topic, text] : extras) j["extras"][topic] = text;
  return j;
}

LocationRecord LocationRecord::from_json(const nlohmann::json& j) {
  LocationRecord r;
  r.tag = TagId::parse(j.at("tag").get<std::string>());
  r.name = j.at("name").get<std::string>();
  r.description = j.at("description").get<std::string>();
  if (const auto& img = j.at("image"); !img.is_null()) r.image_ref = img.get<std::string>();
  if (j.contains("extras")) {
    r.extras = j.at("extras").get<std::map<std::string, std::string>>();
  }
  return r;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& msg) {
  throw RegistryError(RegistryErrc::ParseError,
                      "registry line " + std::to_string(line_no) + ": " + msg, line_no);
}

}  // namespace

Registry parse_registry(std::istream& in) {
  Registry reg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split_tabs(line);
    if (fields.size() < 3) parse_fail(line_no, "expected at least 3 tab-separated fields");

    const auto tag = TagId::try_parse(fields[0]);
    if (!tag) parse_fail(line_no, "malformed tag id '" + std::string(fields[0]) + "'");
    if (fields[1].empty()) parse_fail(line_no, "empty location name");

    LocationRecord rec;
    rec.tag = *tag;
    rec.name = fields[1];
    rec.description = fields[2];
    if (fields.size() > 3 && !fields[3].empty()) rec.image_ref = std::string(fields[3]);
    for (std::size_t i = 4; i < fields.size(); ++i) {
      const auto eq = fields[i].find('=');
      if (eq == std::string_view::npos || eq == 0) {
        parse_fail(line_no, "extra '" + std::string(fields[i]) + "' is not topic=text");
      }
      rec.extras[std::string(fields[i].substr(0, eq))] = fields[i].substr(eq + 1);
    }

    if (reg.records.contains(rec.tag)) {
      throw RegistryError(RegistryErrc::DuplicateTag,
                          "registry line " + std::to_string(line_no) +
                              ": duplicate tag " + rec.tag.to_string(),
                          line_no);
    }
    reg.records.emplace(rec.tag, std::move(rec));
  }
  return reg;
}

Registry load_registry(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw RegistryError(RegistryErrc::Io, "cannot open registry " + file.string());
  }
  return parse_registry(in);
}

std::string format_registry_line(const LocationRecord& record) {
  std::string out = record.tag.to_string();
  out += '\t';
  out += record.name;
  out += '\t';
  out += record.description;
  out += '\t';
  out += record.image_ref.value_or("");
  for (const auto& [topic, text] : record.extras) {
    out += '\t';
    out += topic;
    out += '=';
    out += text;
  }
  return out;
}

void save_registry(const std::filesystem::path& file, const Registry& registry) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw RegistryError(RegistryErrc::Io, "cannot write registry " + file.string());
  for (const auto& [_, rec] : registry.records) out << format_registry_line(rec) << '\n';
}

const LocationRecord& resolve(const Registry& registry, TagId tag) {
  const auto it = registry.records.find(tag);
  if (it == registry.records.end()) {
    throw RegistryError(RegistryErrc::NotFound, "tag " + tag.to_string() + " not registered");
  }
  return it->second;
}

}  // namespace rfidlbs
