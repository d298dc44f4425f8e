#include "specmatch/audio_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <optional>
#include <string>

#include "specmatch/error.h"

namespace specmatch {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(std::span<const std::byte> b, std::size_t at) {
  return static_cast<std::uint16_t>(std::to_integer<unsigned>(b[at]) |
                                    (std::to_integer<unsigned>(b[at + 1]) << 8));
}

std::uint32_t read_u32(std::span<const std::byte> b, std::size_t at) {
  return static_cast<std::uint32_t>(read_u16(b, at)) |
         (static_cast<std::uint32_t>(read_u16(b, at + 2)) << 16);
}

void put_u16(std::vector<std::byte>& out, std::uint16_t v) {
  out.push_back(static_cast<std::byte>(v & 0xFF));
  out.push_back(static_cast<std::byte>(v >> 8));
}

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  put_u16(out, static_cast<std::uint16_t>(v & 0xFFFF));
  put_u16(out, static_cast<std::uint16_t>(v >> 16));
}

void put_tag(std::vector<std::byte>& out, const char (&tag)[5]) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>(tag[i]));
}

bool tag_is(std::span<const std::byte> b, std::size_t at, const char (&tag)[5]) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

FormatChunk parse_fmt(std::span<const std::byte> chunk) {
  if (chunk.size() < 16) throw Error(ErrorCode::CorruptHeader, "fmt chunk shorter than 16 bytes");
  FormatChunk fmt;
  fmt.format = read_u16(chunk, 0);
  fmt.channels = read_u16(chunk, 2);
  fmt.sample_rate = read_u32(chunk, 4);
  fmt.block_align = read_u16(chunk, 12);
  fmt.bits = read_u16(chunk, 14);
  if (fmt.format == kFormatExtensible) {
    // cbSize(2) validBits(2) channelMask(4) then the subformat GUID, whose
    // first two bytes carry the plain format code.
    if (chunk.size() < 26) throw Error(ErrorCode::CorruptHeader, "truncated WAVE_FORMAT_EXTENSIBLE");
    fmt.format = read_u16(chunk, 24);
  }
  return fmt;
}

double decode_sample(std::span<const std::byte> b, std::size_t at, const FormatChunk& fmt) {
  switch (fmt.bits) {
    case 8:
      return (static_cast<double>(std::to_integer<unsigned>(b[at])) - 128.0) / 128.0;
    case 16:
      return static_cast<double>(static_cast<std::int16_t>(read_u16(b, at))) / 32768.0;
    case 24: {
      std::uint32_t raw = std::to_integer<std::uint32_t>(b[at]) |
                          (std::to_integer<std::uint32_t>(b[at + 1]) << 8) |
                          (std::to_integer<std::uint32_t>(b[at + 2]) << 16);
      if (raw & 0x800000u) raw |= 0xFF000000u;
      return static_cast<double>(static_cast<std::int32_t>(raw)) / 8388608.0;
    }
    case 32:
      if (fmt.format == kFormatFloat) {
        float f;
        std::uint32_t raw = read_u32(b, at);
        std::memcpy(&f, &raw, sizeof f);
        return static_cast<double>(f);
      }
      return static_cast<double>(static_cast<std::int32_t>(read_u32(b, at))) / 2147483648.0;
    default:
      break;
  }
  throw Error(ErrorCode::UnsupportedFormat, "unsupported bit depth " + std::to_string(fmt.bits));
}

void validate_format(const FormatChunk& fmt) {
  if (fmt.format != kFormatPcm && fmt.format != kFormatFloat) {
    throw Error(ErrorCode::UnsupportedFormat, "format code " + std::to_string(fmt.format) +
                                                  " is neither PCM (1) nor IEEE float (3)");
  }
  if (fmt.channels == 0 || fmt.channels > 2) {
    throw Error(ErrorCode::UnsupportedFormat,
                std::to_string(fmt.channels) + " channels (only mono and stereo are supported)");
  }
  if (fmt.sample_rate == 0) throw Error(ErrorCode::CorruptHeader, "sample rate is zero");
  const bool int_ok = fmt.format == kFormatPcm &&
                      (fmt.bits == 8 || fmt.bits == 16 || fmt.bits == 24 || fmt.bits == 32);
  const bool float_ok = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!int_ok && !float_ok) {
    throw Error(ErrorCode::UnsupportedFormat, "unsupported bit depth " + std::to_string(fmt.bits));
  }
  if (fmt.block_align != fmt.channels * (fmt.bits / 8)) {
    throw Error(ErrorCode::CorruptHeader, "block align " + std::to_string(fmt.block_align) +
                                              " inconsistent with channels and bit depth");
  }
}

}  // namespace

std::size_t seconds_to_samples(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::llround(seconds * static_cast<double>(sample_rate)));
}

AudioBuffer decode_wav(std::span<const std::byte> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw Error(ErrorCode::CorruptHeader, "missing RIFF/WAVE signature");
  }

  std::optional<FormatChunk> fmt;
  std::span<const std::byte> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) {
      throw Error(ErrorCode::CorruptHeader,
                  "chunk at byte " + std::to_string(pos) + " overruns the file");
    }
    auto chunk = bytes.subspan(body, size);
    if (tag_is(bytes, pos, "fmt ")) {
      fmt = parse_fmt(chunk);
    } else if (tag_is(bytes, pos, "data")) {
      data = chunk;
      have_data = true;
      break;
    }
    pos = body + size + (size & 1u);
  }

  if (!fmt) throw Error(ErrorCode::CorruptHeader, "no fmt chunk before data");
  if (!have_data) throw Error(ErrorCode::CorruptHeader, "no data chunk");
  validate_format(*fmt);

  const std::size_t frame_bytes = fmt->block_align;
  const std::size_t sample_bytes = fmt->bits / 8u;
  const std::size_t frames = data.size() / frame_bytes;

  AudioBuffer out;
  out.sample_rate = static_cast<int>(fmt->sample_rate);
  out.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const std::size_t at = i * frame_bytes;
    double v = decode_sample(data, at, *fmt);
    if (fmt->channels == 2) v = 0.5 * (v + decode_sample(data, at + sample_bytes, *fmt));
    out.samples[i] = std::clamp(v, -1.0, 1.0);
  }
  return out;
}

AudioBuffer load_audio(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read error on " + path.string());
  try {
    return decode_wav(std::as_bytes(std::span<const char>(raw)));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::byte> encode_wav(const AudioBuffer& audio) {
  if (audio.sample_rate <= 0) throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::vector<std::byte> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double s : audio.samples) {
    const long q = std::lround(std::clamp(s, -1.0, 1.0) * 32768.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L))));
  }
  return out;
}

void save_wav(const AudioBuffer& audio, const std::filesystem::path& path) {
  const auto bytes = encode_wav(audio);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed on " + path.string());
}

AudioBuffer trim(const AudioBuffer& audio, double start_seconds, double end_seconds) {
  if (start_seconds < 0.0 || end_seconds < 0.0) {
    throw Error(ErrorCode::InvalidRange, "trim bounds must be nonnegative");
  }
  if (start_seconds == 0.0 && end_seconds == 0.0) return audio;

  const double duration = audio.duration_seconds();
  if (start_seconds > 0.0 && end_seconds > 0.0 && start_seconds > end_seconds) {
    throw Error(ErrorCode::InvalidRange, "start " + std::to_string(start_seconds) +
                                             " s is after end " + std::to_string(end_seconds) + " s");
  }
  if (start_seconds >= duration && start_seconds > 0.0) {
    throw Error(ErrorCode::InvalidRange, "start " + std::to_string(start_seconds) +
                                             " s is not before the duration " +
                                             std::to_string(duration) + " s");
  }

  const std::size_t n = audio.samples.size();
  const std::size_t first = std::min(seconds_to_samples(start_seconds, audio.sample_rate), n);
  const std::size_t last =
      end_seconds == 0.0 ? n : std::min(seconds_to_samples(end_seconds, audio.sample_rate), n);

  AudioBuffer out;
  out.sample_rate = audio.sample_rate;
  if (last > first) {
    out.samples.assign(audio.samples.begin() + static_cast<std::ptrdiff_t>(first),
                       audio.samples.begin() + static_cast<std::ptrdiff_t>(last));
  }
  return out;
}

AudioBuffer gen_tone(std::span<const ToneSegment> segments, int sample_rate) {
  if (sample_rate <= 0) throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  const double nyquist = sample_rate / 2.0;
  std::size_t total = 0;
  for (const auto& seg : segments) {
    if (seg.frequency_hz >= nyquist) {
      throw Error(ErrorCode::AliasedFrequency, std::to_string(seg.frequency_hz) +
                                                   " Hz is at or above Nyquist (" +
                                                   std::to_string(nyquist) + " Hz)");
    }
    if (seg.frequency_hz < 0.0) throw Error(ErrorCode::InvalidArgument, "negative frequency");
    if (!(seg.duration_seconds > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "segment duration must be positive");
    }
    if (seg.amplitude < 0.0 || seg.amplitude > 1.0) {
      throw Error(ErrorCode::InvalidArgument, "amplitude must lie in [0, 1]");
    }
    total += seconds_to_samples(seg.duration_seconds, sample_rate);
  }

  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.samples.reserve(total);
  const double two_pi = 2.0 * std::numbers::pi;
  for (const auto& seg : segments) {
    const std::size_t count = seconds_to_samples(seg.duration_seconds, sample_rate);
    const double w = two_pi * seg.frequency_hz / sample_rate;
    for (std::size_t n = 0; n < count; ++n) {
      out.samples.push_back(seg.amplitude * std::sin(w * static_cast<double>(n)));
    }
  }
  return out;
}

}  // namespace specmatch
