// SPDX-License-Identifier: Apache-2.0
#include "posefollow/track.hpp"

#include "posefollow/error.hpp"

#include <cmath>
#include <string>

namespace posefollow {

void TrackMeta::validate() const
{
  if ( formatVersion != 1 )
    throw DataError( "unsupported_version", "unsupported format_version " + std::to_string( formatVersion ) );
  if ( frameWidth <= 0 || frameHeight <= 0 )
    throw DataError( "schema", "frame dimensions must be positive" );
  if ( !( std::isfinite( nominalFps ) && nominalFps > 0.0 ) )
    throw DataError( "schema", "nominal_fps must be positive" );
  if ( keypointSchema != "coco17" )
    throw DataError( "schema", "unsupported keypoint_schema '" + keypointSchema + "'" );
  if ( session )
    session->config.validate();
}

Track::Track( TrackMeta meta, std::vector<TrackFrame> frames ) : meta_( std::move( meta ) ), frames_( std::move( frames ) )
{
  meta_.validate();
  if ( frames_.empty() )
    throw DataError( "schema", "track has no frames" );
  for ( std::size_t i = 0; i < frames_.size(); ++i )
  {
    const double t = frames_[i].t;
    if ( !( std::isfinite( t ) && t >= 0.0 ) )
      throw DataError( "schema", "frame " + std::to_string( i ) + " has invalid timestamp" );
    if ( i > 0 && !( t > frames_[i - 1].t ) )
      throw DataError( "schema", "frame " + std::to_string( i ) + " timestamp not strictly increasing" );
    if ( frames_[i].playback && !( std::isfinite( *frames_[i].playback ) && *frames_[i].playback >= 0.0 ) )
      throw DataError( "schema", "frame " + std::to_string( i ) + " has invalid playback position" );
  }
}

}  // namespace posefollow
