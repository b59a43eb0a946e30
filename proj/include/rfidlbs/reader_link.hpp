#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfidlbs/tag_model.hpp"

namespace rfidlbs {

// Serial wire format, one tag read per frame, 8 bytes:
//
//   offset  0     1      2      3      4      5      6      7
//          0xAA  id[4]  id[3]  id[2]  id[1]  id[0]  xor    0x55
//
// id[4] is the most significant byte of the 40-bit id. xor is the XOR of the
// five id bytes.
constexpr std::size_t kFrameSize = 8;
constexpr std::uint8_t kFrameStart = 0xAA;
constexpr std::uint8_t kFrameEnd = 0x55;

using FrameBytes = std::array<std::uint8_t, kFrameSize>;

struct TagReportFrame {
  TagId tag_id;
  double timestamp = 0.0;  // set by the receiver, not carried on the wire
  friend bool operator==(const TagReportFrame&, const TagReportFrame&) = default;
};

enum class FrameErrc { BadDelimiter, ChecksumMismatch };

class FrameError : public std::runtime_error {
public:
  FrameError(FrameErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  FrameErrc code() const noexcept { return code_; }

private:
  FrameErrc code_;
};

FrameBytes encode_frame(TagId id) noexcept;
TagReportFrame decode_frame(std::span<const std::uint8_t, kFrameSize> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);

struct ScanDiagnostics {
  std::size_t skipped_bytes = 0;
  std::size_t rejected_candidates = 0;
  friend bool operator==(const ScanDiagnostics&, const ScanDiagnostics&) = default;
};

struct ScanResult {
  std::vector<TagReportFrame> frames;
  ScanDiagnostics diagnostics;
};

/// Incremental receiver for the serial byte stream. Bytes that cannot start a
/// valid frame are skipped one at a time until the stream resynchronises. An
/// incomplete frame at the end of a chunk is held until more bytes arrive.
class StreamScanner {
public:
  /// Returns frames completed by this chunk, stamped with `now`.
  std::vector<TagReportFrame> feed(std::span<const std::uint8_t> bytes,
                                   double now = 0.0);
  /// Discards the held partial frame, counting it as skipped.
  void finish();

  const ScanDiagnostics& diagnostics() const noexcept { return diag_; }
  std::size_t pending_bytes() const noexcept { return buffer_.size(); }

private:
  std::vector<std::uint8_t> buffer_;
  ScanDiagnostics diag_;
};

ScanResult scan_stream(std::span<const std::uint8_t> bytes);

}  // namespace rfidlbs
