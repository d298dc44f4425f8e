/// @file spectro.h
/// @brief Magnitude STFT matrices and max+1 normalization.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "specmatch/audio_io.h"

namespace specmatch {

/// @brief STFT framing parameters.
/// @details Bins retained are DFT bins 1..bins in ascending frequency. For real
/// input these carry the same magnitudes as the top `bins` outputs of the DFT,
/// in reverse order.
struct SpectroConfig {
  std::size_t window_len = 4096;
  std::size_t hop = 512;
  std::size_t bins = 1024;

  /// Throws InvalidConfig unless 0 < hop <= window_len and 0 < bins <= window_len / 2.
  void validate() const;

  friend bool operator==(const SpectroConfig&, const SpectroConfig&) = default;
};

/// Frame count for `num_samples` with the trailing partial frame dropped; 0 if
/// the signal is shorter than one window.
std::size_t frame_count(std::size_t num_samples, std::size_t window_len, std::size_t hop);

/// @brief Row-major frames x bins matrix of nonnegative magnitudes.
class SpectrogramMatrix {
 public:
  SpectrogramMatrix() = default;
  SpectrogramMatrix(std::vector<double> data, std::size_t frames, SpectroConfig config,
                    double frame_hop_seconds, double source_duration_seconds);

  std::size_t frames() const noexcept { return frames_; }
  std::size_t bins() const noexcept { return config_.bins; }
  const SpectroConfig& config() const noexcept { return config_; }
  double frame_hop_seconds() const noexcept { return frame_hop_seconds_; }
  double source_duration_seconds() const noexcept { return source_duration_seconds_; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t frame) const noexcept {
    return std::span<const double>(data_).subspan(frame * bins(), bins());
  }
  double at(std::size_t frame, std::size_t bin) const noexcept { return data_[frame * bins() + bin]; }

  /// Contiguous frames [first, first + count) as a new matrix with the same metadata.
  SpectrogramMatrix slice_frames(std::size_t first, std::size_t count) const;

  /// Entrywise scaling by a positive gain.
  SpectrogramMatrix scaled(double gain) const;

  /// Rounds every magnitude to the nearest 32-bit float, the catalog's storage precision.
  SpectrogramMatrix quantized_to_float() const;

  double max_value() const noexcept;

  friend bool operator==(const SpectrogramMatrix&, const SpectrogramMatrix&) = default;

 private:
  std::vector<double> data_;
  std::size_t frames_ = 0;
  SpectroConfig config_;
  double frame_hop_seconds_ = 0.0;
  double source_duration_seconds_ = 0.0;
};

/// @brief Rectangular-window magnitude STFT.
/// @details Frames of window_len samples at stride hop; trailing partial frame
/// dropped. Throws AudioTooShort below one window.
SpectrogramMatrix stft_magnitude(const AudioBuffer& audio, const SpectroConfig& config = {});

/// Magnitudes of DFT bins 1..bins of a single frame (length = window size).
std::vector<double> frame_magnitudes(std::span<const double> frame, std::size_t bins);

/// Divides every entry by (global max + 1).
SpectrogramMatrix normalize(const SpectrogramMatrix& m);

}  // namespace specmatch
