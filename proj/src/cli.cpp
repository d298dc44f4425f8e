#include "specmatch/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string_view>

#include "specmatch/catalog.h"
#include "specmatch/error.h"
#include "specmatch/matcher.h"
#include "specmatch/spectro.h"

namespace specmatch::cli {

namespace {

constexpr const char* kToneSpecHelp =
    "Comma-separated freq:dur:amp triples, e.g. \"440:0.5:1.0,494:0.5:1.0\". "
    "freq in Hz (below Nyquist), dur in seconds (> 0), amp in [0, 1]. "
    "Each segment is a sine starting at phase 0.";

struct SpectroFlags {
  std::size_t window = 4096;
  std::size_t hop = 512;
  std::size_t bins = 1024;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--window", window, "STFT window length in samples")->capture_default_str();
    cmd->add_option("--hop", hop, "STFT hop in samples")->capture_default_str();
    cmd->add_option("--bins", bins, "retained frequency bins (1..window/2)")->capture_default_str();
  }
  SpectroConfig config() const { return {window, hop, bins}; }
};

struct MatchFlags {
  std::size_t step = 1;
  bool paper_rescale = false;
  bool no_normalize = false;
  unsigned threads = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--step", step, "window stride in frames")->capture_default_str();
    cmd->add_flag("--paper-rescale", paper_rescale,
                  "map window index linearly onto [0, track duration] instead of window start time");
    cmd->add_flag("--no-normalize", no_normalize, "compare raw magnitudes (skip max+1 normalization)");
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
  }
  MatchConfig config() const {
    MatchConfig cfg;
    cfg.step = step;
    cfg.time_mapping = paper_rescale ? TimeMapping::PaperRescale : TimeMapping::ExactStart;
    cfg.normalize = !no_normalize;
    cfg.threads = threads;
    return cfg;
  }
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void print_warnings(const std::vector<Warning>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "WARN " << w.file << ": " << w.reason << '\n';
}

void write_csv_file(const ErrorCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  write_curve_csv(curve, out);
  if (!out) throw Error(ErrorCode::IoFailure, "write failed on " + path.string());
}

int cmd_build(const std::string& dir, const std::string& output, const SpectroConfig& config,
              std::ostream& out, std::ostream& err) {
  BuildResult built;
  try {
    built = build_catalog(dir, config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::EmptyCorpus ? kNoCandidate : kFailure;
  }
  print_warnings(built.warnings, err);
  save_catalog(built.catalog, output);
  for (const auto& t : built.catalog.tracks) {
    out << t.name << "\tduration=" << fixed6(t.duration_seconds) << "\tframes=" << t.matrix.frames()
        << '\n';
  }
  return kOk;
}

struct MatchArgs {
  std::string query;
  std::string db;
  double start = 0.0;
  double end = 0.0;
  double threshold = 0.7;
  std::string curves_out;
};

int cmd_match(const MatchArgs& args, const MatchConfig& cfg, std::ostream& out, std::ostream& err) {
  const Catalog catalog = load_catalog(args.db);
  const AudioBuffer query = trim(load_audio(args.query), args.start, args.end);

  QueryResult result;
  try {
    result = query_catalog(catalog, query, cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoEligibleTrack || e.code() == ErrorCode::EmptyCorpus) {
      err << "error: " << e.what() << '\n';
      return kNoCandidate;
    }
    throw;
  }
  print_warnings(result.warnings, err);

  out << "rank\ttrack\tbest_time_s\tbest_error\tcontrast\tverdict\n";
  for (std::size_t i = 0; i < result.ranking.size(); ++i) {
    const auto& m = result.ranking[i];
    const bool match = m.result.contrast < args.threshold;
    out << (i + 1) << '\t' << m.track << '\t' << fixed6(m.result.best_time) << '\t'
        << fixed6(m.result.best_error) << '\t' << fixed6(m.result.contrast) << '\t'
        << (match ? "MATCH" : "NO-MATCH") << '\n';
  }

  if (!args.curves_out.empty()) {
    std::filesystem::create_directories(args.curves_out);
    const SpectrogramMatrix segment = stft_magnitude(query, catalog.config);
    for (const auto& m : result.ranking) {
      const auto it = std::find_if(catalog.tracks.begin(), catalog.tracks.end(),
                                   [&](const TrackEntry& t) { return t.name == m.track; });
      write_csv_file(error_curve(it->matrix, segment, cfg),
                     std::filesystem::path(args.curves_out) / (m.track + ".csv"));
    }
  }
  return result.ranking.front().result.contrast < args.threshold ? kOk : kNoMatch;
}

int cmd_curve(const std::string& full_path, const std::string& segment_path,
              const std::string& output, const SpectroConfig& spectro, const MatchConfig& cfg,
              std::ostream& out, std::ostream& err) {
  const SpectrogramMatrix full = stft_magnitude(load_audio(full_path), spectro);
  const SpectrogramMatrix segment = stft_magnitude(load_audio(segment_path), spectro);
  ErrorCurve curve;
  try {
    curve = error_curve(full, segment, cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SegmentTooLong) {
      err << "error: " << e.what() << '\n';
      return kNoCandidate;
    }
    throw;
  }
  write_csv_file(curve, output);
  const MatchResult best = summarize(curve);
  out << "min=" << fixed6(best.best_error) << " at t=" << fixed6(best.best_time) << '\n';
  return kOk;
}

int cmd_gen(const std::string& spec, int rate, const std::string& output) {
  const auto segments = parse_tone_spec(spec);
  save_wav(gen_tone(segments, rate), output);
  return kOk;
}

double parse_number(std::string_view text, std::string_view triple) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::InvalidArgument, "malformed tone triple '" + std::string(triple) +
                                                "': '" + std::string(text) + "' is not a number");
  }
  return v;
}

}  // namespace

std::vector<ToneSegment> parse_tone_spec(const std::string& spec) {
  std::vector<ToneSegment> out;
  if (spec.empty()) throw Error(ErrorCode::InvalidArgument, "empty tone spec");
  std::string_view rest(spec);
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view triple = rest.substr(0, comma);
    const auto c1 = triple.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : triple.find(':', c1 + 1);
    if (c2 == std::string_view::npos || triple.find(':', c2 + 1) != std::string_view::npos) {
      throw Error(ErrorCode::InvalidArgument,
                  "malformed tone triple '" + std::string(triple) + "' (expected freq:dur:amp)");
    }
    out.push_back({parse_number(triple.substr(0, c1), triple),
                   parse_number(triple.substr(c1 + 1, c2 - c1 - 1), triple),
                   parse_number(triple.substr(c2 + 1), triple)});
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Volume-independent audio snippet matching by spectrogram comparison", "specmatch"};
  app.require_subcommand(1);

  // build-db
  auto* build = app.add_subcommand("build-db", "precompute a catalog from a directory of WAV files");
  std::string build_dir, build_out;
  SpectroFlags build_spectro;
  build->add_option("dir", build_dir, "directory of WAV recordings")->required();
  build->add_option("-o,--output", build_out, "catalog file to write")->required();
  build_spectro.add_to(build);

  // match
  auto* match = app.add_subcommand("match", "rank catalog tracks against a query snippet");
  MatchArgs match_args;
  MatchFlags match_flags;
  match->add_option("query", match_args.query, "query WAV")->required();
  match->add_option("--db", match_args.db, "catalog file")->required();
  match->add_option("--start", match_args.start, "trim query start in seconds (0 = beginning)");
  match->add_option("--end", match_args.end, "trim query end in seconds (0 = to the end)");
  match->add_option("--threshold", match_args.threshold,
                    "contrast below which the best window is reported as MATCH")
      ->capture_default_str();
  match->add_option("--curves-out", match_args.curves_out, "directory for one CSV curve per track");
  match_flags.add_to(match);

  // curve
  auto* curve = app.add_subcommand("curve", "export the sliding SAD error curve of a segment over a track");
  std::string curve_full, curve_segment, curve_out;
  SpectroFlags curve_spectro;
  MatchFlags curve_flags;
  curve->add_option("full", curve_full, "full-track WAV")->required();
  curve->add_option("segment", curve_segment, "segment WAV")->required();
  curve->add_option("-o,--output", curve_out, "CSV output path")->required();
  curve_spectro.add_to(curve);
  curve_flags.add_to(curve);

  // gen-tone
  auto* gen = app.add_subcommand("gen-tone", "synthesize a sine melody into a 16-bit WAV");
  std::string gen_spec, gen_out;
  int gen_rate = 44100;
  gen->add_option("--spec", gen_spec, kToneSpecHelp)->required();
  gen->add_option("--rate", gen_rate, "sample rate in Hz")->capture_default_str();
  gen->add_option("-o,--output", gen_out, "WAV output path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kFailure;
  }

  try {
    if (*build) {
      const SpectroConfig config = build_spectro.config();
      config.validate();
      return cmd_build(build_dir, build_out, config, out, err);
    }
    if (*match) {
      const MatchConfig cfg = match_flags.config();
      cfg.validate();
      return cmd_match(match_args, cfg, out, err);
    }
    if (*curve) {
      const SpectroConfig spectro = curve_spectro.config();
      const MatchConfig cfg = curve_flags.config();
      spectro.validate();
      cfg.validate();
      return cmd_curve(curve_full, curve_segment, curve_out, spectro, cfg, out, err);
    }
    if (*gen) return cmd_gen(gen_spec, gen_rate, gen_out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace specmatch::cli
