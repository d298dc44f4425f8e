/// @file audio_io.h
/// @brief WAV decode/encode, mono mixdown, trimming and test-tone synthesis.

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace specmatch {

/// @brief Mono sample sequence at a fixed rate.
/// @details Decoded buffers are clamped to [-1, 1]. In-memory gain changes are
/// allowed to leave that range; only decode and encode clamp.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 44100;

  std::size_t size() const noexcept { return samples.size(); }
  double duration_seconds() const noexcept {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
};

/// One segment of a synthesized tone sequence.
struct ToneSegment {
  double frequency_hz = 0.0;
  double duration_seconds = 0.0;
  double amplitude = 1.0;
};

/// @brief Decodes a PCM WAV file (8/16/24/32-bit int or 32-bit float, 1 or 2
/// channels). Stereo is averaged to mono.
AudioBuffer load_audio(const std::filesystem::path& path);

/// @brief Decodes WAV bytes already in memory. Same rules as load_audio().
AudioBuffer decode_wav(std::span<const std::byte> bytes);

/// @brief Writes a 16-bit PCM mono WAV.
void save_wav(const AudioBuffer& audio, const std::filesystem::path& path);

/// @brief Encodes a 16-bit PCM mono WAV into memory.
std::vector<std::byte> encode_wav(const AudioBuffer& audio);

/// @brief Cuts a region in seconds.
/// @details Zero arguments are sentinels: (0, 0) keeps everything, (0, e) keeps
/// [0, e), (s, 0) keeps [s, duration). Boundaries round to the nearest sample
/// and an end past the buffer clamps to its duration.
AudioBuffer trim(const AudioBuffer& audio, double start_seconds, double end_seconds);

/// @brief Concatenated sine segments, phase restarting at zero per segment.
AudioBuffer gen_tone(std::span<const ToneSegment> segments, int sample_rate);

/// Sample count for `seconds` at `sample_rate`, rounded to nearest.
std::size_t seconds_to_samples(double seconds, int sample_rate);

}  // namespace specmatch
