#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "specmatch/error.h"
#include "specmatch/spectro.h"
#include "support/oracles.h"
#include "support/synth.h"

using namespace specmatch;
using specmatch::testing::direct_dft_magnitudes;

namespace {

std::vector<double> random_frame(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

SpectrogramMatrix matrix_of(std::vector<double> values, std::size_t frames, std::size_t bins) {
  SpectroConfig cfg{bins * 2, 1, bins};
  return SpectrogramMatrix(std::move(values), frames, cfg, 1.0 / 44100, 1.0);
}

}  // namespace

TEST_CASE("default config is 4096 / 512 / 1024", "[spectro][config]") {
  const SpectroConfig cfg;
  REQUIRE(cfg.window_len == 4096);
  REQUIRE(cfg.hop == 512);
  REQUIRE(cfg.bins == 1024);
  REQUIRE_NOTHROW(cfg.validate());
  REQUIRE_THROWS_AS((SpectroConfig{4096, 8192, 1024}.validate()), Error);
  REQUIRE_THROWS_AS((SpectroConfig{4096, 0, 1024}.validate()), Error);
  REQUIRE_THROWS_AS((SpectroConfig{4096, 512, 2049}.validate()), Error);
  REQUIRE_THROWS_AS((SpectroConfig{4096, 512, 0}.validate()), Error);
}

TEST_CASE("frame counts", "[spectro][stft]") {
  AudioBuffer a{std::vector<double>(4096, 0.1), 44100};
  auto m = stft_magnitude(a);
  REQUIRE(m.frames() == 1);
  REQUIRE(m.bins() == 1024);
  REQUIRE(m.data().size() == 1024);

  a.samples.resize(4608, 0.1);
  REQUIRE(stft_magnitude(a).frames() == 2);
  a.samples.resize(4608 + 511, 0.1);
  REQUIRE(stft_magnitude(a).frames() == 2);

  a.samples.resize(4095);
  try {
    stft_magnitude(a);
    FAIL("expected AudioTooShort");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::AudioTooShort);
  }
}

TEST_CASE("frame count matches the closed form for random triples", "[spectro][stft][property]") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t window = std::uniform_int_distribution<std::size_t>(2, 256)(rng);
    const std::size_t hop = std::uniform_int_distribution<std::size_t>(1, window)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(window, window + 2000)(rng);
    const std::size_t bins = std::uniform_int_distribution<std::size_t>(1, window / 2)(rng);
    const AudioBuffer a{std::vector<double>(n, 0.25), 8000};
    const auto m = stft_magnitude(a, {window, hop, bins});
    REQUIRE(m.frames() == (n - window) / hop + 1);
    REQUIRE(m.data().size() == m.frames() * bins);
  }
}

TEST_CASE("on-bin sinusoid peaks at N/2", "[spectro][stft][oracle]") {
  const double freq = 16.0 * 44100.0 / 4096.0;
  const std::vector<ToneSegment> segs = {{freq, 4096.0 / 44100.0, 1.0}};
  const AudioBuffer a = gen_tone(segs, 44100);
  REQUIRE(a.samples.size() == 4096);

  const auto m = stft_magnitude(a);
  REQUIRE(m.frames() == 1);
  // Retained index 15 is DFT bin 16.
  REQUIRE(std::abs(m.at(0, 15) - 2048.0) <= 1e-6 * 2048.0);
  for (std::size_t k = 0; k < m.bins(); ++k) {
    if (k != 15) REQUIRE(m.at(0, k) < 1e-6 * 2048.0);
  }

  const auto oracle = direct_dft_magnitudes(a.samples);
  REQUIRE(std::abs(oracle[16] - 2048.0) <= 1e-6 * 2048.0);
  for (std::size_t k = 0; k < m.bins(); ++k) {
    REQUIRE(std::abs(m.at(0, k) - oracle[k + 1]) <= 1e-6 * 2048.0);
  }
}

TEST_CASE("FFT magnitudes agree with the direct DFT", "[spectro][oracle]") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 3; ++trial) {
    const auto frame = random_frame(rng, 4096);
    const auto fast = frame_magnitudes(frame, 2048);
    const auto slow = direct_dft_magnitudes(frame);
    const double scale = *std::max_element(slow.begin(), slow.end());
    for (std::size_t k = 0; k < fast.size(); ++k) {
      REQUIRE(std::abs(fast[k] - slow[k + 1]) <= 1e-6 * std::max(slow[k + 1], 1e-3 * scale));
    }
  }
}

TEST_CASE("retained low bins mirror the top of the DFT", "[spectro][oracle]") {
  std::mt19937 rng(5);
  const auto frame = random_frame(rng, 4096);
  const auto full = direct_dft_magnitudes(frame);
  const std::size_t n = frame.size();
  for (std::size_t k = 1; k < n / 2; ++k) {
    REQUIRE(std::abs(full[n - k] - full[k]) <= 1e-9 * full[k]);
  }
  // The last 1024 DFT outputs, reversed, are the retained bins 1..1024.
  const auto kept = frame_magnitudes(frame, 1024);
  for (std::size_t j = 0; j < 1024; ++j) {
    const double top = full[n - 1 - j];
    REQUIRE(std::abs(kept[j] - top) <= 1e-6 * top);
  }
}

TEST_CASE("STFT magnitude is linear in positive gain", "[spectro][stft][property]") {
  const AudioBuffer noise = specmatch::testing::white_noise(0.3, 17);
  const auto base = stft_magnitude(noise);
  for (double c : {0.25, 0.7, 1.9, 4.0}) {
    const auto gained = stft_magnitude(specmatch::testing::scaled(noise, c));
    REQUIRE(gained.frames() == base.frames());
    for (std::size_t i = 0; i < base.data().size(); ++i) {
      const double expect = c * base.data()[i];
      REQUIRE(std::abs(gained.data()[i] - expect) <= 1e-9 * expect);
    }
  }
}

TEST_CASE("normalize divides by max + 1", "[spectro][normalize]") {
  SECTION("all zeros stay zero") {
    const auto z = normalize(matrix_of(std::vector<double>(6, 0.0), 3, 2));
    for (double v : z.data()) REQUIRE(v == 0.0);
  }
  SECTION("[1, 3] becomes [0.25, 0.75]") {
    const auto n = normalize(matrix_of({1.0, 3.0}, 1, 2));
    REQUIRE(n.data()[0] == 0.25);
    REQUIRE(n.data()[1] == 0.75);
    REQUIRE(n.frames() == 1);
    REQUIRE(n.bins() == 2);
  }
  SECTION("entries lie in [0, max / (max + 1)]") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 5000.0);
    std::vector<double> v(64 * 8);
    for (double& x : v) x = u(rng);
    const auto m = matrix_of(v, 64, 8);
    const double mx = m.max_value();
    for (double x : normalize(m).data()) {
      REQUIRE(x >= 0.0);
      REQUIRE(x <= mx / (mx + 1.0));
      REQUIRE(x < 1.0);
    }
  }
}

TEST_CASE("doubling the gain moves normalized values by less than 1 / (2 max)", "[spectro][normalize][property]") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const double hi = std::uniform_real_distribution<double>(1.0, 1e4)(rng);
    std::uniform_real_distribution<double> u(0.0, hi);
    std::vector<double> v(32);
    for (double& x : v) x = u(rng);
    v[trial % 32] = hi;  // pin the max so max >= 1
    const auto m = matrix_of(v, 4, 8);
    const double mx = m.max_value();
    const auto once = normalize(m);
    const auto twice = normalize(m.scaled(2.0));
    for (std::size_t i = 0; i < v.size(); ++i) {
      REQUIRE(std::abs(twice.data()[i] - once.data()[i]) < 1.0 / (2.0 * mx));
    }
  }
}

TEST_CASE("matrix slicing and float quantization", "[spectro][matrix]") {
  const auto m = matrix_of({1, 2, 3, 4, 5, 6}, 3, 2);
  const auto s = m.slice_frames(1, 2);
  REQUIRE(s.frames() == 2);
  REQUIRE(s.at(0, 0) == 3);
  REQUIRE(s.at(1, 1) == 6);
  REQUIRE_THROWS_AS(m.slice_frames(2, 2), Error);

  const auto q = matrix_of({0.1, 1.0 / 3.0}, 1, 2).quantized_to_float();
  REQUIRE(q.data()[0] == static_cast<double>(0.1f));
  REQUIRE(q.data()[1] == static_cast<double>(static_cast<float>(1.0 / 3.0)));
}
