#include "specmatch/spectro.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <string>

#include "specmatch/error.h"

namespace specmatch {

namespace {

// FFTW's planner is not reentrant; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

/// Real-to-complex transform of a fixed size with owned, aligned buffers.
class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    if (!in_ || !out_) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
    if (!plan_) throw Error(ErrorCode::InvalidConfig, "FFTW could not plan size " + std::to_string(n));
  }

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }

  /// Writes |X_k| for k = 1..out.size().
  void magnitudes(std::span<const double> frame, std::span<double> out) {
    std::copy(frame.begin(), frame.end(), in_.get());
    fftw_execute(plan_);
    for (std::size_t k = 0; k < out.size(); ++k) {
      const auto& c = out_.get()[k + 1];
      out[k] = std::hypot(c[0], c[1]);
    }
  }

  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  std::unique_ptr<double, FftwFree> in_;
  std::unique_ptr<fftw_complex, FftwFree> out_;
  fftw_plan plan_ = nullptr;
};

}  // namespace

void SpectroConfig::validate() const {
  if (window_len == 0) throw Error(ErrorCode::InvalidConfig, "window length must be positive");
  if (hop == 0 || hop > window_len) {
    throw Error(ErrorCode::InvalidConfig, "hop " + std::to_string(hop) + " must lie in [1, window " +
                                              std::to_string(window_len) + "]");
  }
  if (bins == 0 || bins > window_len / 2) {
    throw Error(ErrorCode::InvalidConfig, "bins " + std::to_string(bins) + " must lie in [1, " +
                                              std::to_string(window_len / 2) + "]");
  }
}

std::size_t frame_count(std::size_t num_samples, std::size_t window_len, std::size_t hop) {
  if (num_samples < window_len) return 0;
  return (num_samples - window_len) / hop + 1;
}

SpectrogramMatrix::SpectrogramMatrix(std::vector<double> data, std::size_t frames,
                                     SpectroConfig config, double frame_hop_seconds,
                                     double source_duration_seconds)
    : data_(std::move(data)),
      frames_(frames),
      config_(config),
      frame_hop_seconds_(frame_hop_seconds),
      source_duration_seconds_(source_duration_seconds) {
  if (data_.size() != frames_ * config_.bins) {
    throw Error(ErrorCode::ShapeMismatch, "matrix data holds " + std::to_string(data_.size()) +
                                              " values, expected " + std::to_string(frames_) + " x " +
                                              std::to_string(config_.bins));
  }
}

SpectrogramMatrix SpectrogramMatrix::slice_frames(std::size_t first, std::size_t count) const {
  if (first + count > frames_) {
    throw Error(ErrorCode::IndexOutOfRange, "frames [" + std::to_string(first) + ", " +
                                                std::to_string(first + count) + ") exceed " +
                                                std::to_string(frames_));
  }
  const auto begin = data_.begin() + static_cast<std::ptrdiff_t>(first * bins());
  std::vector<double> out(begin, begin + static_cast<std::ptrdiff_t>(count * bins()));
  return {std::move(out), count, config_, frame_hop_seconds_, source_duration_seconds_};
}

SpectrogramMatrix SpectrogramMatrix::scaled(double gain) const {
  std::vector<double> out(data_);
  for (double& v : out) v *= gain;
  return {std::move(out), frames_, config_, frame_hop_seconds_, source_duration_seconds_};
}

SpectrogramMatrix SpectrogramMatrix::quantized_to_float() const {
  std::vector<double> out(data_);
  for (double& v : out) v = static_cast<double>(static_cast<float>(v));
  return {std::move(out), frames_, config_, frame_hop_seconds_, source_duration_seconds_};
}

double SpectrogramMatrix::max_value() const noexcept {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

std::vector<double> frame_magnitudes(std::span<const double> frame, std::size_t bins) {
  if (frame.size() < 2 || bins == 0 || bins > frame.size() / 2) {
    throw Error(ErrorCode::InvalidConfig, "bins " + std::to_string(bins) +
                                              " invalid for a frame of " +
                                              std::to_string(frame.size()) + " samples");
  }
  RealFft fft(frame.size());
  std::vector<double> out(bins);
  fft.magnitudes(frame, out);
  return out;
}

SpectrogramMatrix stft_magnitude(const AudioBuffer& audio, const SpectroConfig& config) {
  config.validate();
  if (audio.sample_rate <= 0) throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  const std::size_t frames = frame_count(audio.samples.size(), config.window_len, config.hop);
  if (frames == 0) {
    throw Error(ErrorCode::AudioTooShort, std::to_string(audio.samples.size()) +
                                              " samples is fewer than one window of " +
                                              std::to_string(config.window_len));
  }

  std::vector<double> data(frames * config.bins);
  RealFft fft(config.window_len);
  const std::span<const double> samples(audio.samples);
  for (std::size_t f = 0; f < frames; ++f) {
    fft.magnitudes(samples.subspan(f * config.hop, config.window_len),
                   std::span<double>(data).subspan(f * config.bins, config.bins));
  }
  return {std::move(data), frames, config,
          static_cast<double>(config.hop) / static_cast<double>(audio.sample_rate),
          audio.duration_seconds()};
}

SpectrogramMatrix normalize(const SpectrogramMatrix& m) {
  const double denom = m.max_value() + 1.0;
  std::vector<double> out(m.data().begin(), m.data().end());
  for (double& v : out) v /= denom;
  return {std::move(out), m.frames(), m.config(), m.frame_hop_seconds(),
          m.source_duration_seconds()};
}

}  // namespace specmatch
