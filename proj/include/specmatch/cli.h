/// @file cli.h
/// @brief `specmatch` command dispatch, callable in-process for testing.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "specmatch/audio_io.h"

namespace specmatch::cli {

/// Process exit codes. Stable contract across all subcommands.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,      // I/O, decode, or argument validation failure
  kNoCandidate = 2,  // empty corpus, no eligible track, segment too long
  kNoMatch = 3,      // best candidate judged flat by the contrast threshold
};

/// Runs `specmatch <args...>` (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "freq:dur:amp,freq:dur:amp,..." into tone segments.
/// Throws specmatch::Error(InvalidArgument) naming the offending triple.
std::vector<ToneSegment> parse_tone_spec(const std::string& spec);

}  // namespace specmatch::cli
