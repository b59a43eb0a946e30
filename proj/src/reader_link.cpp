#include "rfidlbs/reader_link.hpp"

#include <algorithm>

namespace rfidlbs {

FrameBytes encode_frame(TagId id) noexcept {
  FrameBytes f{};
  f[0] = kFrameStart;
  std::uint8_t checksum = 0;
  for (int i = 0; i < 5; ++i) {
    const auto b = static_cast<std::uint8_t>(id.value() >> (8 * (4 - i)));
    f[1 + i] = b;
    checksum ^= b;
  }
  f[6] = checksum;
  f[7] = kFrameEnd;
  return f;
}

TagReportFrame decode_frame(std::span<const std::uint8_t, kFrameSize> bytes) {
  if (bytes[0] != kFrameStart || bytes[7] != kFrameEnd) {
    throw FrameError(FrameErrc::BadDelimiter, "bad frame delimiter in " + to_hex(bytes));
  }
  std::uint64_t value = 0;
  std::uint8_t checksum = 0;
  for (int i = 1; i <= 5; ++i) {
    value = (value << 8) | bytes[i];
    checksum ^= bytes[i];
  }
  if (checksum != bytes[6]) {
    throw FrameError(FrameErrc::ChecksumMismatch, "checksum mismatch in " + to_hex(bytes));
  }
  return TagReportFrame{TagId(value), 0.0};
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

namespace {

bool is_valid_frame(std::span<const std::uint8_t, kFrameSize> f) noexcept {
  if (f[0] != kFrameStart || f[7] != kFrameEnd) return false;
  return (f[1] ^ f[2] ^ f[3] ^ f[4] ^ f[5]) == f[6];
}

}  // namespace

std::vector<TagReportFrame> StreamScanner::feed(std::span<const std::uint8_t> bytes,
                                                double now) {
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());

  std::vector<TagReportFrame> out;
  std::size_t pos = 0;
  while (pos < buffer_.size()) {
    if (buffer_[pos] != kFrameStart) {
      ++diag_.skipped_bytes;
      ++pos;
      continue;
    }
    if (buffer_.size() - pos < kFrameSize) break;  // wait for the rest

    const std::span<const std::uint8_t, kFrameSize> candidate(buffer_.data() + pos,
                                                              kFrameSize);
    if (is_valid_frame(candidate)) {
      auto frame = decode_frame(candidate);
      frame.timestamp = now;
      out.push_back(frame);
      pos += kFrameSize;
    } else {
      ++diag_.rejected_candidates;
      ++diag_.skipped_bytes;
      ++pos;
    }
  }
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos));
  return out;
}

void StreamScanner::finish() {
  diag_.skipped_bytes += buffer_.size();
  buffer_.clear();
}

ScanResult scan_stream(std::span<const std::uint8_t> bytes) {
  StreamScanner scanner;
  ScanResult result;
  result.frames = scanner.feed(bytes);
  scanner.finish();
  result.diagnostics = scanner.diagnostics();
  return result;
}

}  // namespace rfidlbs
