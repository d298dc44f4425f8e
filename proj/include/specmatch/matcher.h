/// @file matcher.h
/// @brief Sliding-window SAD comparison of a query spectrogram against a track.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "specmatch/spectro.h"

namespace specmatch {

/// @brief How a 1-based window index becomes a time in seconds.
enum class TimeMapping {
  /// Linear map of [1, n] onto [0, track duration]. Reproduces the classic
  /// error plots but reports a true start t as roughly t * D / (D - S).
  PaperRescale,
  /// Start time of the window: (i - 1) * step * hop / sample_rate.
  ExactStart,
};

struct MatchConfig {
  std::size_t step = 1;
  TimeMapping time_mapping = TimeMapping::ExactStart;
  bool normalize = true;
  /// Worker threads for the window scan; 0 picks hardware concurrency.
  unsigned threads = 0;

  void validate() const;
};

struct CurvePoint {
  double time_seconds = 0.0;
  double error = 0.0;
};

struct ErrorCurve {
  std::vector<CurvePoint> points;
  std::size_t segment_frames = 0;
  TimeMapping mapping_used = TimeMapping::ExactStart;
};

struct MatchResult {
  double best_time = 0.0;
  double best_error = 0.0;
  std::size_t best_index = 1;  // 1-based
  /// best_error / median(curve errors); 0 when the median is 0.
  double contrast = 0.0;
};

/// Number of windows of `segment_frames` at stride `step` over `full_frames`.
/// Throws SegmentTooLong when the segment does not fit.
std::size_t window_count(std::size_t full_frames, std::size_t segment_frames, std::size_t step);

/// @brief Contiguous frame windows of the full matrix.
/// @details Window i (0-based here) covers frames [i * step, i * step + segment_frames).
std::vector<SpectrogramMatrix> sliding_windows(const SpectrogramMatrix& full,
                                               std::size_t segment_frames, std::size_t step);

/// Sum of |a - b| over all entries. Throws ShapeMismatch on unequal lengths.
double sad_error(std::span<const double> a, std::span<const double> b);
double sad_error(const SpectrogramMatrix& a, const SpectrogramMatrix& b);

/// (i - 1) / (n - 1) * duration, or 0 when n == 1. Throws IndexOutOfRange.
double paper_rescale(std::size_t index, std::size_t count, double duration_seconds);

/// (i - 1) * step * frame_hop_seconds. Throws IndexOutOfRange for index 0.
double exact_start(std::size_t index, std::size_t step, double frame_hop_seconds);

/// Time of window `index` under `cfg.time_mapping`.
double rescale_index(std::size_t index, std::size_t count, const SpectrogramMatrix& full,
                     const MatchConfig& cfg);

/// @brief SAD curve of the (normalized) segment against every (normalized) window.
/// @details Each window is normalized by its own max + 1, exactly as if
/// normalize() were applied to the sliced window.
ErrorCurve error_curve(const SpectrogramMatrix& full, const SpectrogramMatrix& segment,
                       const MatchConfig& cfg = {});

/// Argmin of the curve (earliest index on ties) and its contrast.
MatchResult summarize(const ErrorCurve& curve);

MatchResult match_segment(const SpectrogramMatrix& full, const SpectrogramMatrix& segment,
                          const MatchConfig& cfg = {});

/// Writes `time_s,error` CSV, six decimals, LF endings.
void write_curve_csv(const ErrorCurve& curve, std::ostream& out);

}  // namespace specmatch
