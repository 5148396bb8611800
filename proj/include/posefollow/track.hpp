// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "posefollow/config.hpp"
#include "posefollow/pose.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace posefollow {

enum class TrackKind
{
  trainer,
  user_session,
};

/// Extra metadata carried by recorded sessions so they can be replayed.
struct SessionInfo
{
  std::string   participant;
  /// Trainer track file; relative paths resolve against the recording's directory.
  std::string   trainerPath;
  SessionConfig config;

  friend bool operator==( const SessionInfo &, const SessionInfo & ) = default;
};

struct TrackMeta
{
  int                      formatVersion = 1;
  TrackKind                kind          = TrackKind::trainer;
  int                      frameWidth    = 640;
  int                      frameHeight   = 360;
  double                   nominalFps    = 30.0;
  std::string              sourceUri;
  std::string              createdAt;
  std::string              keypointSchema = "coco17";
  std::optional<Condition> condition;
  std::optional<SessionInfo> session;

  /// Throws DataError("schema").
  void validate() const;

  friend bool operator==( const TrackMeta &, const TrackMeta & ) = default;
};

struct TrackFrame
{
  /// Trainer: video playback time. User: capture time. Seconds, >= 0.
  double t = 0.0;
  Pose   pose;
  /// Recorded sessions only: the raw playback position the frame was scored against.
  std::optional<double> playback;

  friend bool operator==( const TrackFrame &, const TrackFrame & ) = default;
};

/// Time-ordered pose sequence. Never empty; timestamps strictly increase.
class Track
{
public:
  /// Throws DataError("schema") when an invariant is violated.
  Track( TrackMeta meta, std::vector<TrackFrame> frames );

  const TrackMeta &           meta() const noexcept { return meta_; }
  std::span<const TrackFrame> frames() const noexcept { return frames_; }
  /// Timestamp of the last frame.
  double duration() const noexcept { return frames_.back().t; }

  friend bool operator==( const Track &, const Track & ) = default;

private:
  TrackMeta               meta_;
  std::vector<TrackFrame> frames_;
};

}  // namespace posefollow
