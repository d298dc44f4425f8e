/// @file catalog.h
/// @brief Precomputed spectrogram database: build, persist, query.
///
/// Binary layout (all integers little-endian, no padding):
///
///     "SPMC"            magic
///     u32 version       currently 1
///     u32 window_len, u32 hop, u32 bins
///     u32 track_count
///     per track:
///       u32 name_len, name bytes (UTF-8, not terminated)
///       u32 sample_rate
///       f64 duration_seconds (IEEE-754 bits)
///       u32 frames
///       frames * bins f32 magnitudes, row-major

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "specmatch/audio_io.h"
#include "specmatch/matcher.h"
#include "specmatch/spectro.h"

namespace specmatch {

inline constexpr char kCatalogMagic[4] = {'S', 'P', 'M', 'C'};
inline constexpr std::uint32_t kCatalogVersion = 1;

struct TrackEntry {
  std::string name;
  double duration_seconds = 0.0;
  int sample_rate = 0;
  /// Magnitudes are held at f32 precision so a loaded catalog equals a built one.
  SpectrogramMatrix matrix;

  friend bool operator==(const TrackEntry&, const TrackEntry&) = default;
};

struct Catalog {
  SpectroConfig config;
  std::vector<TrackEntry> tracks;

  friend bool operator==(const Catalog&, const Catalog&) = default;
};

struct Warning {
  std::string file;
  std::string reason;
};

struct BuildResult {
  Catalog catalog;
  std::vector<Warning> warnings;
};

/// @brief One TrackEntry per *.wav in `dir` (non-recursive), sorted by name.
/// @details Undecodable or too-short files become warnings. Throws EmptyCorpus
/// when nothing usable remains, IoFailure when the directory cannot be read.
BuildResult build_catalog(const std::filesystem::path& dir, const SpectroConfig& config = {});

/// Adds a decoded buffer as a track. Throws AudioTooShort.
TrackEntry make_track(std::string name, const AudioBuffer& audio, const SpectroConfig& config);

std::vector<std::byte> serialize_catalog(const Catalog& catalog);
Catalog deserialize_catalog(std::span<const std::byte> bytes);

void save_catalog(const Catalog& catalog, const std::filesystem::path& path);
Catalog load_catalog(const std::filesystem::path& path);

/// Exact serialized size in bytes.
std::size_t catalog_file_size(const Catalog& catalog);

struct RankedMatch {
  std::string track;
  MatchResult result;
};

struct QueryResult {
  std::vector<RankedMatch> ranking;  // ascending best_error, ties by name
  std::vector<Warning> warnings;     // tracks skipped as ineligible
};

/// @brief Matches `query` against every eligible track.
/// @details Tracks shorter (in frames) than the query or recorded at another
/// sample rate are skipped with a warning. Throws EmptyCorpus, AudioTooShort,
/// or NoEligibleTrack.
QueryResult query_catalog(const Catalog& catalog, const AudioBuffer& query,
                          const MatchConfig& cfg = {});

/// Same as above with the query's spectrogram already computed.
QueryResult query_catalog(const Catalog& catalog, const SpectrogramMatrix& query,
                          int query_sample_rate, const MatchConfig& cfg = {});

}  // namespace specmatch
