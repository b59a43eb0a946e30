#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rfidlbs/tag_model.hpp"

namespace rfidlbs {

struct LocationRecord {
  TagId tag;
  std::string name;
  std::string description;
  std::optional<std::string> image_ref;
  std::map<std::string, std::string> extras;  // topic -> text

  /// {"tag","name","description","image","extras"}; image is null when absent.
  nlohmann::json to_json() const;
  static LocationRecord from_json(const nlohmann::json& j);

  friend bool operator==(const LocationRecord&, const LocationRecord&) = default;
};

struct Registry {
  std::map<TagId, LocationRecord> records;
  std::uint64_t version = 1;
};

enum class RegistryErrc { ParseError, DuplicateTag, NotFound, Io };

class RegistryError : public std::runtime_error {
public:
  RegistryError(RegistryErrc code, const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), code_(code), line_(line) {}
  RegistryErrc code() const noexcept { return code_; }
  /// 1-based line of the offending row, 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }

private:
  RegistryErrc code_;
  std::size_t line_;
};

// Registry file: UTF-8 TSV, one record per line:
//
//   tag_hex <TAB> name <TAB> description <TAB> image_ref [<TAB> topic=text]...
//
// image_ref may be empty (no image). Blank lines and lines starting with '#'
// are ignored.
Registry parse_registry(std::istream& in);
Registry load_registry(const std::filesystem::path& file);

std::string format_registry_line(const LocationRecord& record);
void save_registry(const std::filesystem::path& file, const Registry& registry);

/// Exact-match lookup. Throws RegistryError(NotFound).
const LocationRecord& resolve(const Registry& registry, TagId tag);

}  // namespace rfidlbs
