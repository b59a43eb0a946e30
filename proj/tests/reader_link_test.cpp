#include <gtest/gtest.h>

#include <random>

#include "rfidlbs/reader_link.hpp"

using namespace rfidlbs;

namespace {

// Independent layout oracle: start, id bytes MSB first, XOR fold, end.
std::vector<std::uint8_t> manual_frame(std::uint64_t id) {
  std::vector<std::uint8_t> out{0xAA};
  std::uint8_t x = 0;
  for (int shift = 32; shift >= 0; shift -= 8) {
    const auto b = static_cast<std::uint8_t>((id >> shift) & 0xFF);
    out.push_back(b);
    x = static_cast<std::uint8_t>(x ^ b);
  }
  out.push_back(x);
  out.push_back(0x55);
  return out;
}

std::vector<std::uint8_t> bytes_of(const FrameBytes& f) { return {f.begin(), f.end()}; }

FrameErrc decode_error(const FrameBytes& f) {
  try {
    decode_frame(f);
  } catch (const FrameError& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode accepted " << to_hex(f);
  return FrameErrc::BadDelimiter;
}

}  // namespace

TEST(FrameCodec, EncodesKnownIds) {
  EXPECT_EQ(bytes_of(encode_frame(TagId(0x110055B53A))),
            (std::vector<std::uint8_t>{0xAA, 0x11, 0x00, 0x55, 0xB5, 0x3A, 0xCB, 0x55}));
  EXPECT_EQ(bytes_of(encode_frame(TagId(0))),
            (std::vector<std::uint8_t>{0xAA, 0, 0, 0, 0, 0, 0, 0x55}));
  EXPECT_EQ(bytes_of(encode_frame(TagId(0xFFFFFFFFFF))),
            (std::vector<std::uint8_t>{0xAA, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0x55}));
  EXPECT_EQ(bytes_of(encode_frame(TagId(0x110055B53A))), manual_frame(0x110055B53A));
}

TEST(FrameCodec, DecodesAndValidates) {
  const FrameBytes good{0xAA, 0x11, 0x00, 0x55, 0xB5, 0x3A, 0xCB, 0x55};
  EXPECT_EQ(decode_frame(good).tag_id, TagId(0x110055B53A));

  FrameBytes bad_sum = good;
  bad_sum[6] = 0xCC;
  EXPECT_EQ(decode_error(bad_sum), FrameErrc::ChecksumMismatch);

  FrameBytes bad_start = good;
  bad_start[0] = 0xAB;
  EXPECT_EQ(decode_error(bad_start), FrameErrc::BadDelimiter);

  FrameBytes bad_end = good;
  bad_end[7] = 0x54;
  EXPECT_EQ(decode_error(bad_end), FrameErrc::BadDelimiter);
}

TEST(FrameCodecProperties, RoundTripAndSingleBitCorruption) {
  std::mt19937_64 rng(31337);
  for (int i = 0; i < 10000; ++i) {
    const TagId id(rng() & TagId::kMaxValue);
    const auto f = encode_frame(id);
    ASSERT_EQ(bytes_of(f), manual_frame(id.value()));
    ASSERT_EQ(decode_frame(f).tag_id, id);
  }
  for (int i = 0; i < 1000; ++i) {
    const auto f = encode_frame(TagId(rng() & TagId::kMaxValue));
    for (int byte = 1; byte <= 6; ++byte) {
      for (int bit = 0; bit < 8; ++bit) {
        FrameBytes c = f;
        c[byte] ^= static_cast<std::uint8_t>(1u << bit);
        ASSERT_EQ(decode_error(c), FrameErrc::ChecksumMismatch);
      }
    }
  }
}

TEST(StreamScan, EmptyStream) {
  const auto r = scan_stream({});
  EXPECT_TRUE(r.frames.empty());
  EXPECT_EQ(r.diagnostics, ScanDiagnostics{});
}

TEST(StreamScan, SkipsLeadingGarbage) {
  std::vector<std::uint8_t> stream{0x01, 0x02, 0x03};
  const auto f = manual_frame(0x110055B53A);
  stream.insert(stream.end(), f.begin(), f.end());
  const auto r = scan_stream(stream);
  ASSERT_EQ(r.frames.size(), 1u);
  EXPECT_EQ(r.frames[0].tag_id, TagId(0x110055B53A));
  EXPECT_EQ(r.diagnostics.skipped_bytes, 3u);
  EXPECT_EQ(r.diagnostics.rejected_candidates, 0u);
}

TEST(StreamScan, BackToBackFrames) {
  auto stream = manual_frame(1);
  const auto second = manual_frame(0xFFFFFFFFFF);
  stream.insert(stream.end(), second.begin(), second.end());
  const auto r = scan_stream(stream);
  ASSERT_EQ(r.frames.size(), 2u);
  EXPECT_EQ(r.frames[0].tag_id, TagId(1));
  EXPECT_EQ(r.frames[1].tag_id, TagId(0xFFFFFFFFFF));
}

TEST(StreamScan, ResyncsAfterACorruptCandidate) {
  auto stream = manual_frame(0x110055B53A);
  stream[6] ^= 0x01;  // breaks the checksum
  const auto good = manual_frame(0x2200AA0001);
  stream.insert(stream.end(), good.begin(), good.end());
  const auto r = scan_stream(stream);
  ASSERT_EQ(r.frames.size(), 1u);
  EXPECT_EQ(r.frames[0].tag_id, TagId(0x2200AA0001));
  EXPECT_EQ(r.diagnostics.rejected_candidates, 1u);
  EXPECT_EQ(r.diagnostics.skipped_bytes, 8u);
}

TEST(StreamScan, TrailingPartialFrameCountsAsSkipped) {
  auto stream = manual_frame(7);
  stream.insert(stream.end(), {0xAA, 0x00, 0x01});
  const auto r = scan_stream(stream);
  EXPECT_EQ(r.frames.size(), 1u);
  EXPECT_EQ(r.diagnostics.skipped_bytes, 3u);
}

TEST(StreamScanner, CarriesPartialFramesAcrossChunks) {
  const auto f = manual_frame(0x110055B53A);
  StreamScanner scanner;
  EXPECT_TRUE(scanner.feed(std::span(f).first(5), 1.0).empty());
  EXPECT_EQ(scanner.pending_bytes(), 5u);
  const auto frames = scanner.feed(std::span(f).subspan(5), 2.5);
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].tag_id, TagId(0x110055B53A));
  EXPECT_DOUBLE_EQ(frames[0].timestamp, 2.5);
  EXPECT_EQ(scanner.pending_bytes(), 0u);
}

// Frames interleaved with garbage drawn from an alphabet without 0xAA come
// back exactly, in order, however the stream is chunked.
TEST(StreamScanProperties, RecoversEmbeddedFrames) {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::uint8_t> stream;
    std::vector<TagId> expected;
    std::size_t garbage = 0;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      const int g = static_cast<int>(rng() % 6);
      for (int k = 0; k < g; ++k) {
        std::uint8_t b;
        do {
          b = static_cast<std::uint8_t>(rng());
        } while (b == 0xAA);
        stream.push_back(b);
        ++garbage;
      }
      const TagId id(rng() & TagId::kMaxValue);
      expected.push_back(id);
      const auto f = manual_frame(id.value());
      stream.insert(stream.end(), f.begin(), f.end());
    }

    StreamScanner scanner;
    std::vector<TagId> got;
    std::size_t pos = 0;
    while (pos < stream.size()) {
      const std::size_t len = std::min<std::size_t>(1 + rng() % 10, stream.size() - pos);
      for (const auto& fr : scanner.feed(std::span(stream).subspan(pos, len))) {
        got.push_back(fr.tag_id);
      }
      pos += len;
    }
    scanner.finish();
    ASSERT_EQ(got, expected);
    ASSERT_EQ(scanner.diagnostics().skipped_bytes, garbage);
    ASSERT_EQ(scanner.diagnostics().rejected_candidates, 0u);
  }
}
