#include "specmatch/catalog.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "specmatch/error.h"

namespace specmatch {

namespace {

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
  }
  void u64(std::uint64_t v) {
    u32(static_cast<std::uint32_t>(v));
    u32(static_cast<std::uint32_t>(v >> 32));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::byte*>(p);
    out_.insert(out_.end(), b, b + n);
  }

  std::vector<std::byte> take() { return std::move(out_); }

 private:
  std::vector<std::byte> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4, "u32");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    const std::uint64_t hi = u32();
    return lo | (hi << 32);
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::span<const std::byte> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(ErrorCode::IoFailure, "catalog truncated at byte offset " + std::to_string(pos_) +
                                            " while reading " + what + " (" + std::to_string(n) +
                                            " bytes needed, " + std::to_string(remaining()) +
                                            " available)");
    }
  }

  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

bool has_wav_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".wav";
}

}  // namespace

TrackEntry make_track(std::string name, const AudioBuffer& audio, const SpectroConfig& config) {
  TrackEntry t;
  t.name = std::move(name);
  t.duration_seconds = audio.duration_seconds();
  t.sample_rate = audio.sample_rate;
  t.matrix = stft_magnitude(audio, config).quantized_to_float();
  return t;
}

BuildResult build_catalog(const std::filesystem::path& dir, const SpectroConfig& config) {
  config.validate();
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::IoFailure, dir.string() + " is not a readable directory");
  }

  std::vector<std::filesystem::path> files;
  for (std::filesystem::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_regular_file() && has_wav_extension(it->path())) files.push_back(it->path());
  }
  if (ec) throw Error(ErrorCode::IoFailure, "listing " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });

  BuildResult result;
  result.catalog.config = config;
  std::set<std::string> names;
  for (const auto& file : files) {
    const std::string stem = file.stem().string();
    if (stem.empty() || names.count(stem) != 0) {
      result.warnings.push_back({file.string(), "duplicate or empty track name '" + stem + "'"});
      continue;
    }
    try {
      result.catalog.tracks.push_back(make_track(stem, load_audio(file), config));
      names.insert(stem);
    } catch (const Error& e) {
      result.warnings.push_back({file.string(), e.what()});
    }
  }
  if (result.catalog.tracks.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "no usable WAV files in " + dir.string());
  }
  std::sort(result.catalog.tracks.begin(), result.catalog.tracks.end(),
            [](const TrackEntry& a, const TrackEntry& b) { return a.name < b.name; });
  return result;
}

std::size_t catalog_file_size(const Catalog& catalog) {
  std::size_t size = 4 + 4 + 3 * 4 + 4;
  for (const auto& t : catalog.tracks) {
    size += 4 + t.name.size() + 4 + 8 + 4 + t.matrix.frames() * t.matrix.bins() * 4;
  }
  return size;
}

std::vector<std::byte> serialize_catalog(const Catalog& catalog) {
  ByteWriter w(catalog_file_size(catalog));
  w.raw(kCatalogMagic, 4);
  w.u32(kCatalogVersion);
  w.u32(static_cast<std::uint32_t>(catalog.config.window_len));
  w.u32(static_cast<std::uint32_t>(catalog.config.hop));
  w.u32(static_cast<std::uint32_t>(catalog.config.bins));
  w.u32(static_cast<std::uint32_t>(catalog.tracks.size()));
  for (const auto& t : catalog.tracks) {
    if (!(t.matrix.config() == catalog.config)) {
      throw Error(ErrorCode::ConfigMismatch, "track '" + t.name + "' was built with other STFT settings");
    }
    w.u32(static_cast<std::uint32_t>(t.name.size()));
    w.raw(t.name.data(), t.name.size());
    w.u32(static_cast<std::uint32_t>(t.sample_rate));
    w.f64(t.duration_seconds);
    w.u32(static_cast<std::uint32_t>(t.matrix.frames()));
    for (double v : t.matrix.data()) w.f32(static_cast<float>(v));
  }
  return w.take();
}

Catalog deserialize_catalog(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  const auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kCatalogMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "not a catalog file (expected SPMC)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCatalogVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "catalog version " + std::to_string(version) +
                                                   ", this build reads " +
                                                   std::to_string(kCatalogVersion));
  }

  Catalog c;
  c.config.window_len = r.u32();
  c.config.hop = r.u32();
  c.config.bins = r.u32();
  c.config.validate();
  const std::uint32_t count = r.u32();

  for (std::uint32_t i = 0; i < count; ++i) {
    TrackEntry t;
    const std::uint32_t name_len = r.u32();
    const auto name = r.take(name_len, "track name");
    t.name.assign(reinterpret_cast<const char*>(name.data()), name.size());
    t.sample_rate = static_cast<int>(r.u32());
    if (t.sample_rate <= 0) {
      throw Error(ErrorCode::CorruptHeader, "track '" + t.name + "' has sample rate 0");
    }
    t.duration_seconds = r.f64();
    const std::uint32_t frames = r.u32();
    const std::size_t values = static_cast<std::size_t>(frames) * c.config.bins;
    if (values > r.remaining() / 4) {
      // Report via the reader so the message carries the byte offset.
      r.take(values * 4, "magnitudes");
    }
    std::vector<double> data(values);
    for (double& v : data) v = static_cast<double>(r.f32());
    t.matrix = SpectrogramMatrix(std::move(data), frames, c.config,
                                 static_cast<double>(c.config.hop) / t.sample_rate,
                                 t.duration_seconds);
    c.tracks.push_back(std::move(t));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::CorruptHeader, std::to_string(r.remaining()) +
                                              " trailing bytes after the last track (offset " +
                                              std::to_string(r.position()) + ")");
  }
  return c;
}

void save_catalog(const Catalog& catalog, const std::filesystem::path& path) {
  const auto bytes = serialize_catalog(catalog);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed on " + path.string());
}

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read error on " + path.string());
  return deserialize_catalog(std::as_bytes(std::span<const char>(raw)));
}

QueryResult query_catalog(const Catalog& catalog, const SpectrogramMatrix& query,
                          int query_sample_rate, const MatchConfig& cfg) {
  cfg.validate();
  if (catalog.tracks.empty()) throw Error(ErrorCode::EmptyCorpus, "catalog has no tracks");
  if (!(query.config() == catalog.config)) {
    throw Error(ErrorCode::ConfigMismatch, "query spectrogram does not use the catalog's STFT settings");
  }

  QueryResult out;
  for (const auto& t : catalog.tracks) {
    if (t.sample_rate != query_sample_rate) {
      out.warnings.push_back({t.name, "sample rate " + std::to_string(t.sample_rate) +
                                          " Hz differs from query " +
                                          std::to_string(query_sample_rate) + " Hz"});
      continue;
    }
    if (t.matrix.frames() < query.frames()) {
      out.warnings.push_back({t.name, "track has " + std::to_string(t.matrix.frames()) +
                                          " frames, query needs " + std::to_string(query.frames())});
      continue;
    }
    out.ranking.push_back({t.name, match_segment(t.matrix, query, cfg)});
  }
  if (out.ranking.empty()) {
    throw Error(ErrorCode::NoEligibleTrack, "no track is long enough for the query at its sample rate");
  }
  std::stable_sort(out.ranking.begin(), out.ranking.end(), [](const RankedMatch& a, const RankedMatch& b) {
    if (a.result.best_error != b.result.best_error) return a.result.best_error < b.result.best_error;
    return a.track < b.track;
  });
  return out;
}

QueryResult query_catalog(const Catalog& catalog, const AudioBuffer& query, const MatchConfig& cfg) {
  if (catalog.tracks.empty()) throw Error(ErrorCode::EmptyCorpus, "catalog has no tracks");
  return query_catalog(catalog, stft_magnitude(query, catalog.config), query.sample_rate, cfg);
}

}  // namespace specmatch
