#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "specmatch/audio_io.h"
#include "specmatch/error.h"
#include "support/synth.h"

using namespace specmatch;
using specmatch::testing::TempDir;

namespace {

/// Hand-assembled WAV so decode is checked against bytes we control.
std::vector<std::byte> make_wav(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                                std::uint16_t bits, const std::vector<std::uint8_t>& payload) {
  std::vector<std::byte> out;
  auto u16 = [&](std::uint16_t v) {
    out.push_back(std::byte(v & 0xFF));
    out.push_back(std::byte(v >> 8));
  };
  auto u32 = [&](std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v & 0xFFFF));
    u16(static_cast<std::uint16_t>(v >> 16));
  };
  auto tag = [&](const char* t) {
    for (int i = 0; i < 4; ++i) out.push_back(std::byte(t[i]));
  };
  const std::uint16_t align = static_cast<std::uint16_t>(channels * bits / 8);
  tag("RIFF");
  u32(static_cast<std::uint32_t>(36 + payload.size()));
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * align);
  u16(align);
  u16(bits);
  tag("data");
  u32(static_cast<std::uint32_t>(payload.size()));
  for (auto b : payload) out.push_back(std::byte(b));
  return out;
}

std::vector<std::uint8_t> le16(std::initializer_list<std::int16_t> values) {
  std::vector<std::uint8_t> out;
  for (auto v : values) {
    const auto u = static_cast<std::uint16_t>(v);
    out.push_back(static_cast<std::uint8_t>(u & 0xFF));
    out.push_back(static_cast<std::uint8_t>(u >> 8));
  }
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected specmatch::Error");
  return ErrorCode::IoFailure;
}

}  // namespace

TEST_CASE("16-bit PCM scales by 1/32768", "[audio_io][decode]") {
  const auto wav = make_wav(1, 1, 44100, 16, le16({16384, -32768, 0}));
  const auto a = decode_wav(wav);
  REQUIRE(a.sample_rate == 44100);
  REQUIRE(a.samples == std::vector<double>{0.5, -1.0, 0.0});
}

TEST_CASE("stereo frames average to mono", "[audio_io][decode]") {
  // L = 1.0 is not representable in 16 bits; float32 carries it exactly.
  std::vector<std::uint8_t> payload(8);
  const float l = 1.0f, r = 0.0f;
  std::memcpy(payload.data(), &l, 4);
  std::memcpy(payload.data() + 4, &r, 4);
  const auto a = decode_wav(make_wav(3, 2, 48000, 32, payload));
  REQUIRE(a.samples.size() == 1);
  REQUIRE(a.samples[0] == 0.5);
  REQUIRE(a.sample_rate == 48000);
}

TEST_CASE("stereo with identical channels equals the mono file", "[audio_io][decode][property]") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dist(-32768, 32767);
  std::vector<std::uint8_t> mono, stereo;
  for (int i = 0; i < 500; ++i) {
    const auto v = le16({static_cast<std::int16_t>(dist(rng))});
    mono.insert(mono.end(), v.begin(), v.end());
    stereo.insert(stereo.end(), v.begin(), v.end());
    stereo.insert(stereo.end(), v.begin(), v.end());
  }
  REQUIRE(decode_wav(make_wav(1, 1, 22050, 16, mono)).samples ==
          decode_wav(make_wav(1, 2, 22050, 16, stereo)).samples);
}

TEST_CASE("8, 24 and 32-bit integer PCM", "[audio_io][decode]") {
  SECTION("8-bit is unsigned around 128") {
    const auto a = decode_wav(make_wav(1, 1, 8000, 8, {128, 192, 0}));
    REQUIRE(a.samples == std::vector<double>{0.0, 0.5, -1.0});
  }
  SECTION("24-bit sign-extends") {
    // 0x400000 = 2^22 -> 0.5, 0xC00000 -> -0.5
    const auto a = decode_wav(make_wav(1, 1, 8000, 24, {0x00, 0x00, 0x40, 0x00, 0x00, 0xC0}));
    REQUIRE(a.samples == std::vector<double>{0.5, -0.5});
  }
  SECTION("32-bit integer") {
    const auto a = decode_wav(make_wav(1, 1, 8000, 32, {0x00, 0x00, 0x00, 0x40}));
    REQUIRE(a.samples == std::vector<double>{0.5});
  }
}

TEST_CASE("float samples beyond full scale are clamped", "[audio_io][decode]") {
  std::vector<std::uint8_t> payload(8);
  const float hi = 1.5f, lo = -2.0f;
  std::memcpy(payload.data(), &hi, 4);
  std::memcpy(payload.data() + 4, &lo, 4);
  REQUIRE(decode_wav(make_wav(3, 1, 8000, 32, payload)).samples == std::vector<double>{1.0, -1.0});
}

TEST_CASE("decode errors", "[audio_io][errors]") {
  CHECK(code_of([] { decode_wav(make_wav(2, 1, 8000, 16, le16({0}))); }) ==
        ErrorCode::UnsupportedFormat);
  CHECK(code_of([] { decode_wav(make_wav(1, 3, 8000, 16, le16({0, 0, 0}))); }) ==
        ErrorCode::UnsupportedFormat);
  CHECK(code_of([] { decode_wav(make_wav(1, 1, 8000, 12, le16({0}))); }) ==
        ErrorCode::UnsupportedFormat);

  auto truncated = make_wav(1, 1, 8000, 16, le16({1, 2, 3, 4}));
  truncated.resize(truncated.size() - 3);
  CHECK(code_of([&] { decode_wav(truncated); }) == ErrorCode::CorruptHeader);

  auto bad_sig = make_wav(1, 1, 8000, 16, le16({1}));
  bad_sig[0] = std::byte('X');
  CHECK(code_of([&] { decode_wav(bad_sig); }) == ErrorCode::CorruptHeader);

  CHECK(code_of([] { load_audio("/nonexistent/definitely-missing.wav"); }) == ErrorCode::FileNotFound);
}

TEST_CASE("unknown chunks before data are skipped", "[audio_io][decode]") {
  auto wav = make_wav(1, 1, 8000, 16, le16({16384}));
  // Insert an odd-sized LIST chunk (padded to even) after fmt.
  std::vector<std::byte> list = {std::byte('L'), std::byte('I'), std::byte('S'), std::byte('T'),
                                 std::byte(3),   std::byte(0),   std::byte(0),   std::byte(0),
                                 std::byte(1),   std::byte(2),   std::byte(3),   std::byte(0)};
  wav.insert(wav.begin() + 36, list.begin(), list.end());
  REQUIRE(decode_wav(wav).samples == std::vector<double>{0.5});
}

TEST_CASE("silence decodes to zeros", "[audio_io][decode]") {
  TempDir dir("silence");
  AudioBuffer silent{std::vector<double>(44100, 0.0), 44100};
  save_wav(silent, dir / "s.wav");
  const auto back = load_audio(dir / "s.wav");
  REQUIRE(back.samples.size() == 44100);
  REQUIRE(std::all_of(back.samples.begin(), back.samples.end(), [](double s) { return s == 0.0; }));
}

TEST_CASE("WAV roundtrip within one quantization step", "[audio_io][encode][property]") {
  TempDir dir("roundtrip");
  const std::vector<ToneSegment> segs = {{440, 0.3, 1.0}, {1234.5, 0.2, 0.7}, {50, 0.1, 0.01}};
  AudioBuffer a = gen_tone(segs, 44100);
  a.samples.push_back(1.0);   // clamps to 32767
  a.samples.push_back(-1.0);
  save_wav(a, dir / "t.wav");
  const auto b = load_audio(dir / "t.wav");
  REQUIRE(b.samples.size() == a.samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) worst = std::max(worst, std::abs(a.samples[i] - b.samples[i]));
  REQUIRE(worst <= 1.0 / 32768.0);
}

TEST_CASE("encoded WAV layout", "[audio_io][encode]") {
  SECTION("empty buffer has a zero-length data chunk") {
    const auto bytes = encode_wav(AudioBuffer{{}, 44100});
    REQUIRE(bytes.size() == 44);
    REQUIRE(std::memcmp(bytes.data() + 36, "data", 4) == 0);
    REQUIRE(std::to_integer<int>(bytes[40]) == 0);
    REQUIRE(decode_wav(bytes).samples.empty());
  }
  SECTION("3 s at 44100 Hz carries 3 * 44100 * 2 data bytes") {
    const auto bytes = encode_wav(AudioBuffer{std::vector<double>(3 * 44100, 0.25), 44100});
    REQUIRE(bytes.size() == 44 + 3 * 44100 * 2);
    const std::uint32_t data_len = std::to_integer<std::uint32_t>(bytes[40]) |
                                   (std::to_integer<std::uint32_t>(bytes[41]) << 8) |
                                   (std::to_integer<std::uint32_t>(bytes[42]) << 16) |
                                   (std::to_integer<std::uint32_t>(bytes[43]) << 24);
    REQUIRE(data_len == 3u * 44100u * 2u);
  }
}

TEST_CASE("trim follows the zero-sentinel conventions", "[audio_io][trim]") {
  AudioBuffer ten{std::vector<double>(10 * 1000), 1000};
  for (std::size_t i = 0; i < ten.samples.size(); ++i) ten.samples[i] = static_cast<double>(i) / 1e4;

  const auto whole = trim(ten, 0, 0);
  REQUIRE(whole.samples == ten.samples);

  const auto head = trim(ten, 0, 4);
  REQUIRE(head.samples.size() == 4000);
  REQUIRE(head.samples.front() == ten.samples[0]);

  const auto tail = trim(ten, 3, 0);
  REQUIRE(tail.samples.size() == 7000);
  REQUIRE(tail.samples.front() == ten.samples[3000]);
  REQUIRE(tail.duration_seconds() == 7.0);

  const auto mid = trim(ten, 6, 8);
  REQUIRE(mid.samples.size() == 2000);
  REQUIRE(mid.samples.front() == ten.samples[6000]);

  REQUIRE(trim(ten, 2, 50).samples.size() == 8000);  // end clamps to duration
  REQUIRE(trim(ten, 0.0004, 0.0016).samples.size() == 2);  // rounds to samples 0..2

  CHECK(code_of([&] { trim(ten, 5, 4); }) == ErrorCode::InvalidRange);
  CHECK(code_of([&] { trim(ten, 10, 0); }) == ErrorCode::InvalidRange);
  CHECK(code_of([&] { trim(ten, -1, 2); }) == ErrorCode::InvalidRange);
}

TEST_CASE("trim length property", "[audio_io][trim][property]") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.001, 9.999);
  const AudioBuffer a{std::vector<double>(44100 * 10), 44100};
  for (int i = 0; i < 500; ++i) {
    double s = u(rng), e = u(rng);
    if (s > e) std::swap(s, e);
    const auto expected = static_cast<long long>(std::llround(e * 44100)) - std::llround(s * 44100);
    REQUIRE(static_cast<long long>(trim(a, s, e).samples.size()) == expected);
  }
}

TEST_CASE("gen_tone", "[audio_io][gen_tone]") {
  SECTION("one second at 44100 starts at zero") {
    const std::vector<ToneSegment> segs = {{440, 1.0, 1.0}};
    const auto a = gen_tone(segs, 44100);
    REQUIRE(a.samples.size() == 44100);
    REQUIRE(a.samples[0] == 0.0);
  }
  SECTION("durations add") {
    const std::vector<ToneSegment> segs = {{440, 0.5, 1.0}, {880, 0.5, 1.0}};
    const auto a = gen_tone(segs, 44100);
    REQUIRE(a.samples.size() == 44100);
    REQUIRE(a.samples[22050] == 0.0);  // phase restarts
  }
  SECTION("amplitude bounds the peak") {
    const std::vector<ToneSegment> segs = {{1000, 1.0, 0.25}};
    const auto a = gen_tone(segs, 44100);
    for (double s : a.samples) REQUIRE(std::abs(s) <= 0.25);
  }
  SECTION("RMS of a unit sine is 1/sqrt(2) within 1%") {
    for (double f : {110.0, 440.0, 1234.0, 9000.0}) {
      for (double d : {0.1, 0.37, 1.0}) {
        const std::vector<ToneSegment> segs = {{f, d, 1.0}};
        const auto a = gen_tone(segs, 44100);
        double sq = 0.0;
        for (double s : a.samples) sq += s * s;
        const double rms = std::sqrt(sq / static_cast<double>(a.samples.size()));
        REQUIRE(std::abs(rms - 1.0 / std::sqrt(2.0)) <= 0.01 / std::sqrt(2.0));
      }
    }
  }
  SECTION("errors") {
    const std::vector<ToneSegment> aliased = {{22050, 1.0, 1.0}};
    CHECK(code_of([&] { gen_tone(aliased, 44100); }) == ErrorCode::AliasedFrequency);
    const std::vector<ToneSegment> zero = {{440, 0.0, 1.0}};
    CHECK(code_of([&] { gen_tone(zero, 44100); }) == ErrorCode::InvalidArgument);
    const std::vector<ToneSegment> loud = {{440, 1.0, 1.5}};
    CHECK(code_of([&] { gen_tone(loud, 44100); }) == ErrorCode::InvalidArgument);
  }
}
