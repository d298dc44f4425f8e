#include "specmatch/matcher.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>

#include "specmatch/error.h"

namespace specmatch {

namespace {

/// Σ |query[j] - window[j] / denom|, accumulated in index order so the result
/// is bit-identical to sad_error(query, window / denom).
double scaled_sad(std::span<const double> query, const double* window, double denom) {
  double total = 0.0;
  for (std::size_t j = 0; j < query.size(); ++j) total += std::abs(query[j] - window[j] / denom);
  return total;
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace

void MatchConfig::validate() const {
  if (step == 0) throw Error(ErrorCode::InvalidConfig, "step must be at least 1");
}

std::size_t window_count(std::size_t full_frames, std::size_t segment_frames, std::size_t step) {
  if (step == 0) throw Error(ErrorCode::InvalidConfig, "step must be at least 1");
  if (segment_frames == 0) throw Error(ErrorCode::AudioTooShort, "segment has no frames");
  if (segment_frames > full_frames) {
    throw Error(ErrorCode::SegmentTooLong, "segment of " + std::to_string(segment_frames) +
                                               " frames exceeds track of " +
                                               std::to_string(full_frames) + " frames");
  }
  return (full_frames - segment_frames) / step + 1;
}

std::vector<SpectrogramMatrix> sliding_windows(const SpectrogramMatrix& full,
                                               std::size_t segment_frames, std::size_t step) {
  const std::size_t n = window_count(full.frames(), segment_frames, step);
  std::vector<SpectrogramMatrix> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(full.slice_frames(i * step, segment_frames));
  return out;
}

double sad_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                              " entries");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) total += std::abs(a[j] - b[j]);
  return total;
}

double sad_error(const SpectrogramMatrix& a, const SpectrogramMatrix& b) {
  if (a.frames() != b.frames() || a.bins() != b.bins()) {
    throw Error(ErrorCode::ShapeMismatch,
                std::to_string(a.frames()) + "x" + std::to_string(a.bins()) + " vs " +
                    std::to_string(b.frames()) + "x" + std::to_string(b.bins()));
  }
  return sad_error(a.data(), b.data());
}

double paper_rescale(std::size_t index, std::size_t count, double duration_seconds) {
  if (index < 1 || index > count) {
    throw Error(ErrorCode::IndexOutOfRange,
                "index " + std::to_string(index) + " outside [1, " + std::to_string(count) + "]");
  }
  if (count == 1) return 0.0;
  return static_cast<double>(index - 1) / static_cast<double>(count - 1) * duration_seconds;
}

double exact_start(std::size_t index, std::size_t step, double frame_hop_seconds) {
  if (index < 1) throw Error(ErrorCode::IndexOutOfRange, "window indices start at 1");
  return static_cast<double>((index - 1) * step) * frame_hop_seconds;
}

double rescale_index(std::size_t index, std::size_t count, const SpectrogramMatrix& full,
                     const MatchConfig& cfg) {
  if (cfg.time_mapping == TimeMapping::PaperRescale) {
    return paper_rescale(index, count, full.source_duration_seconds());
  }
  if (index > count) {
    throw Error(ErrorCode::IndexOutOfRange,
                "index " + std::to_string(index) + " outside [1, " + std::to_string(count) + "]");
  }
  return exact_start(index, cfg.step, full.frame_hop_seconds());
}

ErrorCurve error_curve(const SpectrogramMatrix& full, const SpectrogramMatrix& segment,
                       const MatchConfig& cfg) {
  cfg.validate();
  if (!(full.config() == segment.config())) {
    throw Error(ErrorCode::ConfigMismatch, "track and segment were computed with different STFT settings");
  }
  if (full.frame_hop_seconds() != segment.frame_hop_seconds()) {
    throw Error(ErrorCode::ConfigMismatch, "track and segment have different sample rates");
  }
  const std::size_t seg_frames = segment.frames();
  const std::size_t count = window_count(full.frames(), seg_frames, cfg.step);
  const std::size_t bins = full.bins();

  const SpectrogramMatrix query = cfg.normalize ? normalize(segment) : segment;

  std::vector<double> frame_max(full.frames());
  for (std::size_t f = 0; f < full.frames(); ++f) {
    const auto row = full.row(f);
    frame_max[f] = *std::max_element(row.begin(), row.end());
  }

  ErrorCurve curve;
  curve.segment_frames = seg_frames;
  curve.mapping_used = cfg.time_mapping;
  curve.points.resize(count);

  const double* base = full.data().data();
  parallel_for(count, cfg.threads, [&](std::size_t i) {
    const std::size_t first = i * cfg.step;
    double denom = 1.0;
    if (cfg.normalize) {
      const auto from = frame_max.begin() + static_cast<std::ptrdiff_t>(first);
      denom = *std::max_element(from, from + static_cast<std::ptrdiff_t>(seg_frames)) + 1.0;
    }
    curve.points[i] = {rescale_index(i + 1, count, full, cfg),
                       scaled_sad(query.data(), base + first * bins, denom)};
  });
  return curve;
}

MatchResult summarize(const ErrorCurve& curve) {
  if (curve.points.empty()) throw Error(ErrorCode::IndexOutOfRange, "empty error curve");
  MatchResult r;
  std::vector<double> errors;
  errors.reserve(curve.points.size());
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    errors.push_back(p.error);
    if (i == 0 || p.error < r.best_error) {
      r.best_error = p.error;
      r.best_time = p.time_seconds;
      r.best_index = i + 1;
    }
  }
  const double median = median_of(std::move(errors));
  r.contrast = median > 0.0 ? r.best_error / median : 0.0;
  return r;
}

MatchResult match_segment(const SpectrogramMatrix& full, const SpectrogramMatrix& segment,
                          const MatchConfig& cfg) {
  return summarize(error_curve(full, segment, cfg));
}

void write_curve_csv(const ErrorCurve& curve, std::ostream& out) {
  out << "time_s,error\n";
  char line[96];
  for (const auto& p : curve.points) {
    std::snprintf(line, sizeof line, "%.6f,%.6f\n", p.time_seconds, p.error);
    out << line;
  }
}

}  // namespace specmatch
