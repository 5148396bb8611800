// SPDX-License-Identifier: Apache-2.0
#include "posefollow/metric.hpp"

#include "posefollow/error.hpp"

#include <cmath>
#include <numbers>

namespace posefollow {

void MetricConfig::validate() const
{
  if ( !( confidenceThreshold >= 0.0 && confidenceThreshold <= 1.0 ) )
    throw DataError( "invalid_config", "confidence_threshold must lie in [0,1]" );
}

std::optional<double> segmentAngle( const Pose & pose, const Segment & segment, bool aspectCorrect )
{
  const auto & a  = pose[segment.from];
  const auto & b  = pose[segment.to];
  double       dx = b.x - a.x;
  double       dy = b.y - a.y;
  if ( dx == 0.0 && dy == 0.0 )
    return std::nullopt;
  if ( aspectCorrect )
  {
    dx *= pose.frameWidth();
    dy *= pose.frameHeight();
  }
  return std::atan2( dy, dx );
}

double angleDiff( double a, double b )
{
  constexpr double twoPi = 2.0 * std::numbers::pi;
  double           d     = std::fmod( std::abs( a - b ), twoPi );
  if ( d > std::numbers::pi )
    d = twoPi - d;
  return d;
}

Pose mirrorPose( const Pose & pose )
{
  Pose::Keypoints out{};
  for ( std::size_t i = 0; i < kKeypointCount; ++i )
  {
    const auto   id  = static_cast<KeypointId>( i );
    const auto & src = pose[id];
    out[index( mirrorOf( id ) )] = Keypoint{ 1.0 - src.x, src.y, src.score };
  }
  return Pose( out, pose.frameWidth(), pose.frameHeight() );
}

namespace {

bool confident( const Pose & pose, const Segment & seg, double threshold )
{
  return pose[seg.from].score >= threshold && pose[seg.to].score >= threshold;
}

FrameScore scoreAgainst( const Pose & trainer, const Pose & user, const MetricConfig & cfg )
{
  FrameScore score;
  double     sum = 0.0;
  for ( const auto & seg : kSegments )
  {
    if ( !confident( trainer, seg, cfg.confidenceThreshold ) || !confident( user, seg, cfg.confidenceThreshold ) )
      continue;
    const auto ta = segmentAngle( trainer, seg, cfg.aspectCorrect );
    const auto ua = segmentAngle( user, seg, cfg.aspectCorrect );
    if ( !ta || !ua )
      continue;
    const double err               = angleDiff( *ta, *ua );
    score.perSegment[index( seg.id )] = err;
    sum += err;
    ++score.validCount;
  }
  if ( score.validCount > 0 )
    score.meanError = sum / score.validCount;
  return score;
}

}  // namespace

FrameScore frameError( const Pose & trainer, const Pose & user, const MetricConfig & cfg )
{
  if ( cfg.mirrorUser )
    return scoreAgainst( trainer, mirrorPose( user ), cfg );
  return scoreAgainst( trainer, user, cfg );
}

}  // namespace posefollow
