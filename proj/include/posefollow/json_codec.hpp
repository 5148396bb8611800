// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON shapes shared by the track files and the wire protocol.

#include "posefollow/config.hpp"
#include "posefollow/metric.hpp"
#include "posefollow/pose.hpp"
#include "posefollow/session.hpp"
#include "posefollow/track.hpp"

#include <json.hpp>

namespace posefollow::json {

using Json = nlohmann::ordered_json;

/// [[name, x, y, score], ...] in canonical keypoint order.
Json encodeKeypoints( const Pose & pose );
/// Accepts the 17 entries in any order, each name exactly once.
/// Throws DataError("schema") on any violation.
Pose decodeKeypoints( const Json & j, double frameWidth, double frameHeight );

Json          encodeConfig( const SessionConfig & cfg );
/// Overlays whichever fields are present in `j` onto `base`.
SessionConfig decodeConfig( const Json & j, SessionConfig base = {} );

Json      encodeMeta( const TrackMeta & meta );
TrackMeta decodeMeta( const Json & j );

Json       encodeFrame( const TrackFrame & frame );
TrackFrame decodeFrame( const Json & j, const TrackMeta & meta );

/// segment name -> radians, or null where the segment did not contribute.
Json encodePerSegment( const std::array<std::optional<double>, kSegmentCount> & values );

Json encodeSummary( const TrialSummary & summary );

// Typed field access; throw DataError("schema") naming the field.
double             requireNumber( const Json & j, const char * field );
int                requireInt( const Json & j, const char * field );
bool               requireBool( const Json & j, const char * field );
std::string        requireString( const Json & j, const char * field );
const Json &       requireField( const Json & j, const char * field );

}  // namespace posefollow::json
