// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "posefollow/pose.hpp"

#include <array>
#include <optional>

namespace posefollow {

struct MetricConfig
{
  double confidenceThreshold = 0.3;
  bool   mirrorUser          = true;
  bool   aspectCorrect       = true;

  /// Throws DataError("invalid_config") if the threshold is outside [0,1].
  void validate() const;

  friend bool operator==( const MetricConfig &, const MetricConfig & ) = default;
};

/// Angular error of one trainer/user frame pair, in radians.
struct FrameScore
{
  /// Empty where the segment did not contribute.
  std::array<std::optional<double>, kSegmentCount> perSegment{};
  int                                              validCount = 0;
  /// Present iff validCount >= 1.
  std::optional<double> meanError;

  friend bool operator==( const FrameScore &, const FrameScore & ) = default;
};

/// Orientation in (-pi, pi] of the vector from the segment's first endpoint to its second,
/// in screen coordinates (y down). Aspect-corrected space scales x and y by the frame
/// dimensions. Empty when the endpoints coincide.
std::optional<double> segmentAngle( const Pose & pose, const Segment & segment, bool aspectCorrect );

/// Smallest absolute difference of two orientations modulo 2*pi, in [0, pi].
double angleDiff( double a, double b );

/// Reflects the pose about the vertical midline and swaps left/right keypoints.
Pose mirrorPose( const Pose & pose );

/// Mean per-segment angular difference between the trainer and the user. A segment counts
/// only when both endpoints clear the confidence threshold in both poses and both angles
/// are defined.
FrameScore frameError( const Pose & trainer, const Pose & user, const MetricConfig & cfg );

}  // namespace posefollow
