// SPDX-License-Identifier: Apache-2.0
#include "posefollow/pose.hpp"

#include "posefollow/error.hpp"

#include <cmath>
#include <string>

namespace posefollow {

namespace {

constexpr std::array<std::string_view, kKeypointCount> kKeypointNames{
  "nose",          "left_eye",       "right_eye",  "left_ear",    "right_ear",
  "left_shoulder", "right_shoulder", "left_elbow", "right_elbow", "left_wrist",
  "right_wrist",   "left_hip",       "right_hip",  "left_knee",   "right_knee",
  "left_ankle",    "right_ankle",
};

constexpr std::array<std::string_view, kSegmentCount> kSegmentNames{
  "shoulder_line", "hip_line",    "upper_arm_l", "upper_arm_r", "lower_arm_l",
  "lower_arm_r",   "upper_leg_l", "upper_leg_r", "lower_leg_l", "lower_leg_r",
};

}  // namespace

std::string_view keypointName( KeypointId id ) noexcept
{
  return kKeypointNames[index( id )];
}

std::optional<KeypointId> keypointFromName( std::string_view name ) noexcept
{
  for ( std::size_t i = 0; i < kKeypointCount; ++i )
    if ( kKeypointNames[i] == name )
      return static_cast<KeypointId>( i );
  return std::nullopt;
}

KeypointId mirrorOf( KeypointId id ) noexcept
{
  // Canonical order pairs every left keypoint with the right one that follows it.
  const auto i = index( id );
  if ( i == 0 )
    return id;
  return static_cast<KeypointId>( i % 2 == 1 ? i + 1 : i - 1 );
}

bool isHead( KeypointId id ) noexcept
{
  return index( id ) <= index( KeypointId::right_ear );
}

std::string_view segmentName( SegmentId id ) noexcept
{
  return kSegmentNames[index( id )];
}

std::optional<SegmentId> segmentFromName( std::string_view name ) noexcept
{
  for ( std::size_t i = 0; i < kSegmentCount; ++i )
    if ( kSegmentNames[i] == name )
      return static_cast<SegmentId>( i );
  return std::nullopt;
}

Pose::Pose( const Keypoints & keypoints, double frameWidth, double frameHeight )
  : keypoints_( keypoints ), frameWidth_( frameWidth ), frameHeight_( frameHeight )
{
  if ( !( std::isfinite( frameWidth ) && frameWidth > 0 && std::isfinite( frameHeight ) && frameHeight > 0 ) )
    throw DataError( "schema", "frame dimensions must be positive" );

  for ( std::size_t i = 0; i < kKeypointCount; ++i )
  {
    const auto & kp   = keypoints_[i];
    const auto   name = std::string( kKeypointNames[i] );
    if ( !std::isfinite( kp.x ) || !std::isfinite( kp.y ) )
      throw DataError( "schema", "keypoint " + name + " has non-finite coordinates" );
    if ( !( kp.score >= 0.0 && kp.score <= 1.0 ) )
      throw DataError( "schema", "keypoint " + name + " score outside [0,1]" );
  }
}

}  // namespace posefollow
