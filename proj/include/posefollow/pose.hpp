// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace posefollow {

/// The 17-point keypoint schema ("coco17"), in canonical order.
enum class KeypointId : std::uint8_t
{
  nose,
  left_eye,
  right_eye,
  left_ear,
  right_ear,
  left_shoulder,
  right_shoulder,
  left_elbow,
  right_elbow,
  left_wrist,
  right_wrist,
  left_hip,
  right_hip,
  left_knee,
  right_knee,
  left_ankle,
  right_ankle,
};

inline constexpr std::size_t kKeypointCount = 17;

std::string_view        keypointName( KeypointId id ) noexcept;
std::optional<KeypointId> keypointFromName( std::string_view name ) noexcept;

/// Left/right counterpart of a keypoint; nose maps to itself.
KeypointId mirrorOf( KeypointId id ) noexcept;

/// Head keypoints take no part in the metric.
bool isHead( KeypointId id ) noexcept;

constexpr std::size_t index( KeypointId id ) noexcept { return static_cast<std::size_t>( id ); }

/// Position normalized to the frame ([0,1] nominally; slightly outside is allowed) and
/// estimator confidence in [0,1].
struct Keypoint
{
  double x     = 0.0;
  double y     = 0.0;
  double score = 0.0;

  friend bool operator==( const Keypoint &, const Keypoint & ) = default;
};

/// One person's keypoints at one instant. Always holds all 17 keypoints.
class Pose
{
public:
  using Keypoints = std::array<Keypoint, kKeypointCount>;

  /// Throws DataError("schema") on non-finite coordinates, scores outside [0,1], or
  /// non-positive frame dimensions.
  Pose( const Keypoints & keypoints, double frameWidth, double frameHeight );

  const Keypoint &  operator[]( KeypointId id ) const noexcept { return keypoints_[index( id )]; }
  const Keypoints & keypoints() const noexcept { return keypoints_; }
  double            frameWidth() const noexcept { return frameWidth_; }
  double            frameHeight() const noexcept { return frameHeight_; }

  friend bool operator==( const Pose &, const Pose & ) = default;

private:
  Keypoints keypoints_;
  double    frameWidth_;
  double    frameHeight_;
};

enum class SegmentId : std::uint8_t
{
  shoulder_line,
  hip_line,
  upper_arm_l,
  upper_arm_r,
  lower_arm_l,
  lower_arm_r,
  upper_leg_l,
  upper_leg_r,
  lower_leg_l,
  lower_leg_r,
};

inline constexpr std::size_t kSegmentCount = 10;

struct Segment
{
  SegmentId  id;
  KeypointId from;
  KeypointId to;
};

/// The fixed body-segment table. The head is not part of it.
inline constexpr std::array<Segment, kSegmentCount> kSegments{ {
  { SegmentId::shoulder_line, KeypointId::left_shoulder, KeypointId::right_shoulder },
  { SegmentId::hip_line, KeypointId::left_hip, KeypointId::right_hip },
  { SegmentId::upper_arm_l, KeypointId::left_shoulder, KeypointId::left_elbow },
  { SegmentId::upper_arm_r, KeypointId::right_shoulder, KeypointId::right_elbow },
  { SegmentId::lower_arm_l, KeypointId::left_elbow, KeypointId::left_wrist },
  { SegmentId::lower_arm_r, KeypointId::right_elbow, KeypointId::right_wrist },
  { SegmentId::upper_leg_l, KeypointId::left_hip, KeypointId::left_knee },
  { SegmentId::upper_leg_r, KeypointId::right_hip, KeypointId::right_knee },
  { SegmentId::lower_leg_l, KeypointId::left_knee, KeypointId::left_ankle },
  { SegmentId::lower_leg_r, KeypointId::right_knee, KeypointId::right_ankle },
} };

constexpr std::size_t index( SegmentId id ) noexcept { return static_cast<std::size_t>( id ); }
constexpr const Segment & segment( SegmentId id ) noexcept { return kSegments[index( id )]; }

std::string_view         segmentName( SegmentId id ) noexcept;
std::optional<SegmentId> segmentFromName( std::string_view name ) noexcept;

}  // namespace posefollow
