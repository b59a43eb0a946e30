#include "rfidlbs/tag_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace rfidlbs {

namespace {

int hex_digit(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

TagId::TagId(std::uint64_t value) : value_(value) {
  if (value > kMaxValue) {
    throw std::out_of_range("tag id exceeds 40 bits");
  }
}

std::optional<TagId> TagId::try_parse(std::string_view text) noexcept {
  if (text.size() != kTextLength) return std::nullopt;
  std::uint64_t v = 0;
  for (char c : text) {
    const int d = hex_digit(c);
    if (d < 0) return std::nullopt;
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  TagId id;
  id.value_ = v;
  return id;
}

TagId TagId::parse(std::string_view text) {
  if (auto id = try_parse(text)) return *id;
  throw TagError(TagErrc::MalformedId,
                 "malformed tag id '" + std::string(text) +
                     "': expected 10 hex characters");
}

std::string TagId::to_string() const {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out(kTextLength, '0');
  std::uint64_t v = value_;
  for (std::size_t i = kTextLength; i-- > 0;) {
    out[i] = kDigits[v & 0xF];
    v >>= 4;
  }
  return out;
}

std::string_view to_string(TagClass c) noexcept {
  switch (c) {
    case TagClass::Class0: return "class0";
    case TagClass::Class1: return "class1";
    case TagClass::Class2: return "class2";
    case TagClass::Class3: return "class3";
    case TagClass::Class4: return "class4";
  }
  return "?";
}

std::string_view to_string(TagPower p) noexcept {
  return p == TagPower::Passive ? "passive" : "active";
}

std::optional<TagClass> parse_tag_class(std::string_view text) noexcept {
  static constexpr std::array kAll{TagClass::Class0, TagClass::Class1,
                                   TagClass::Class2, TagClass::Class3,
                                   TagClass::Class4};
  // Accept "class2", "Class2" and the bare digit "2".
  for (TagClass c : kAll) {
    const auto name = to_string(c);
    if (text.size() == name.size() &&
        std::equal(text.begin(), text.end(), name.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == b;
        })) {
      return c;
    }
    if (text.size() == 1 && text[0] == name.back()) return c;
  }
  return std::nullopt;
}

std::optional<TagPower> parse_tag_power(std::string_view text) noexcept {
  if (text == "passive" || text == "Passive") return TagPower::Passive;
  if (text == "active" || text == "Active") return TagPower::Active;
  return std::nullopt;
}

std::string_view to_string(TagErrc e) noexcept {
  switch (e) {
    case TagErrc::MalformedId: return "MalformedId";
    case TagErrc::ReadOnlyTag: return "ReadOnlyTag";
    case TagErrc::AlreadyWritten: return "AlreadyWritten";
    case TagErrc::OutOfBounds: return "OutOfBounds";
    case TagErrc::TagKilled: return "TagKilled";
    case TagErrc::BadKillCode: return "BadKillCode";
    case TagErrc::Unsupported: return "Unsupported";
  }
  return "?";
}

Tag Tag::manufacture(TagId id, TagClass tag_class, TagPower power,
                     std::uint16_t kill_code,
                     std::optional<std::size_t> capacity) {
  const std::size_t limit = max_memory_capacity(power);
  const std::size_t cap = capacity.value_or(limit);
  if (cap > limit) {
    throw std::invalid_argument("memory capacity " + std::to_string(cap) +
                                " exceeds " + std::to_string(limit) +
                                " bytes for a " + std::string(to_string(power)) +
                                " tag");
  }
  Tag t;
  t.id = id;
  t.tag_class = tag_class;
  t.power = power;
  t.memory.assign(cap, 0);
  t.kill_code = kill_code;
  return t;
}

namespace {

void check_bounds(const Tag& tag, std::size_t offset, std::size_t length) {
  if (offset > tag.capacity() || length > tag.capacity() - offset) {
    throw TagError(TagErrc::OutOfBounds,
                   "range [" + std::to_string(offset) + ", " +
                       std::to_string(offset + length) + ") outside " +
                       std::to_string(tag.capacity()) + "-byte memory");
  }
}

void check_alive(const Tag& tag) {
  if (tag.killed) {
    throw TagError(TagErrc::TagKilled, "tag " + tag.id.to_string() + " is killed");
  }
}

}  // namespace

Tag write_memory(const Tag& tag, std::size_t offset,
                 std::span<const std::uint8_t> data) {
  check_alive(tag);
  if (tag.tag_class == TagClass::Class0) {
    throw TagError(TagErrc::ReadOnlyTag,
                   "tag " + tag.id.to_string() + " is read-only");
  }
  if (tag.tag_class == TagClass::Class1 && tag.write_count > 0) {
    throw TagError(TagErrc::AlreadyWritten,
                   "tag " + tag.id.to_string() + " was already written once");
  }
  check_bounds(tag, offset, data.size());

  Tag out = tag;
  std::copy(data.begin(), data.end(),
            out.memory.begin() + static_cast<std::ptrdiff_t>(offset));
  ++out.write_count;
  return out;
}

std::vector<std::uint8_t> read_memory(const Tag& tag, std::size_t offset,
                                      std::size_t length) {
  check_alive(tag);
  check_bounds(tag, offset, length);
  const auto first = tag.memory.begin() + static_cast<std::ptrdiff_t>(offset);
  return {first, first + static_cast<std::ptrdiff_t>(length)};
}

Tag kill(const Tag& tag, std::uint16_t code) {
  if (code != tag.kill_code) {
    throw TagError(TagErrc::BadKillCode,
                   "wrong kill code for tag " + tag.id.to_string());
  }
  Tag out = tag;
  out.killed = true;
  return out;
}

Tag record_sensor_reading(const Tag& tag, std::span<const std::uint8_t>) {
  throw TagError(TagErrc::Unsupported,
                 "sensor recording is not modeled (tag " + tag.id.to_string() +
                     ", " + std::string(to_string(tag.tag_class)) + ")");
}

void transmit_to_tag(const Tag& from, const Tag&, std::span<const std::uint8_t>) {
  throw TagError(TagErrc::Unsupported,
                 "tag-to-tag transmission is not modeled (tag " +
                     from.id.to_string() + ")");
}

}  // namespace rfidlbs
