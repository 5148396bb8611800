// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "posefollow/track.hpp"

#include <filesystem>
#include <iosfwd>

namespace posefollow {

/// Line-delimited JSON (.poses.jsonl): line 1 is the meta record, every further line one
/// frame. Output is deterministic for a given track.
void writeTrack( const Track & track, std::ostream & out );
void writeTrackFile( const Track & track, const std::filesystem::path & path );

/// Validates every invariant; errors are DataErrors whose message starts with
/// "line N:" (1-based).
Track readTrack( std::istream & in );
Track readTrackFile( const std::filesystem::path & path );

}  // namespace posefollow
