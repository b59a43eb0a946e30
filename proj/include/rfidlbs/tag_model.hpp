#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rfidlbs {

/// 40-bit tag serial number. Text form is exactly 10 uppercase hex digits.
class TagId {
public:
  static constexpr std::uint64_t kMaxValue = (std::uint64_t{1} << 40) - 1;
  static constexpr std::size_t kTextLength = 10;

  constexpr TagId() = default;
  /// Throws std::out_of_range when value does not fit in 40 bits.
  explicit TagId(std::uint64_t value);

  /// Accepts exactly 10 hex characters in either letter case.
  static TagId parse(std::string_view text);
  static std::optional<TagId> try_parse(std::string_view text) noexcept;

  constexpr std::uint64_t value() const noexcept { return value_; }
  std::string to_string() const;

  friend constexpr auto operator<=>(TagId, TagId) = default;

private:
  std::uint64_t value_ = 0;
};

enum class TagClass {
  Class0,  // read-only, programmed at manufacture
  Class1,  // write once
  Class2,  // read-write
  Class3,  // read-write with sensors
  Class4,  // read-write with transmitter
};

enum class TagPower { Passive, Active };

std::string_view to_string(TagClass c) noexcept;
std::string_view to_string(TagPower p) noexcept;
std::optional<TagClass> parse_tag_class(std::string_view text) noexcept;
std::optional<TagPower> parse_tag_power(std::string_view text) noexcept;

constexpr std::size_t kPassiveMemoryCapacity = 128;
constexpr std::size_t kActiveMemoryCapacity = 128 * 1024;

constexpr std::size_t max_memory_capacity(TagPower p) noexcept {
  return p == TagPower::Passive ? kPassiveMemoryCapacity : kActiveMemoryCapacity;
}

enum class TagErrc {
  MalformedId,
  ReadOnlyTag,
  AlreadyWritten,
  OutOfBounds,
  TagKilled,
  BadKillCode,
  Unsupported,
};

std::string_view to_string(TagErrc e) noexcept;

class TagError : public std::runtime_error {
public:
  TagError(TagErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  TagErrc code() const noexcept { return code_; }

private:
  TagErrc code_;
};

/// A tag record. Operations below take a tag by const reference and return
/// the updated copy; the input is never modified.
struct Tag {
  TagId id;
  TagClass tag_class = TagClass::Class0;
  TagPower power = TagPower::Passive;
  std::vector<std::uint8_t> memory;
  std::uint32_t write_count = 0;
  bool killed = false;
  std::uint16_t kill_code = 0;

  /// Zero-filled memory. capacity defaults to the maximum for the power type
  /// and may not exceed it.
  static Tag manufacture(TagId id, TagClass tag_class, TagPower power,
                         std::uint16_t kill_code = 0,
                         std::optional<std::size_t> capacity = std::nullopt);

  std::size_t capacity() const noexcept { return memory.size(); }

  friend bool operator==(const Tag&, const Tag&) = default;
};

Tag write_memory(const Tag& tag, std::size_t offset,
                 std::span<const std::uint8_t> data);

std::vector<std::uint8_t> read_memory(const Tag& tag, std::size_t offset,
                                      std::size_t length);

/// Wrong code throws BadKillCode. Killing a killed tag with the right code is
/// a no-op success.
Tag kill(const Tag& tag, std::uint16_t code);

// Class3 sensor logging and Class4 tag-to-tag transmission are not modeled;
// both always throw Unsupported.
Tag record_sensor_reading(const Tag& tag, std::span<const std::uint8_t> reading);
void transmit_to_tag(const Tag& from, const Tag& to,
                     std::span<const std::uint8_t> payload);

}  // namespace rfidlbs

template <>
struct std::hash<rfidlbs::TagId> {
  std::size_t operator()(rfidlbs::TagId id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value());
  }
};
