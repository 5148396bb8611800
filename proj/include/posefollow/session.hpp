// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "posefollow/config.hpp"
#include "posefollow/metric.hpp"
#include "posefollow/track.hpp"

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace posefollow {

/// Nearest trainer frame to `position` within `tolerance` seconds; ties go to the
/// earlier frame.
const TrackFrame * align( const Track & trainer, double position, double tolerance );

/// Per-coordinate exponential moving average; scores come from `next`.
Pose smooth( const std::optional<Pose> & prev, const Pose & next, double alpha );

struct ScoredFrame
{
  double     userT;
  double     trainerT;
  FrameScore score;
};

struct Unscored
{
  /// "no_trainer_frame" or "no_valid_segments".
  std::string reason;
};

using FrameResult = std::variant<FrameScore, Unscored>;

struct TrialSummary
{
  double                                           meanError     = 0.0;
  int                                              frameCount    = 0;
  int                                              unscoredCount = 0;
  std::array<std::optional<double>, kSegmentCount> perSegmentMeans{};
  /// Span of capture times of every processed frame.
  double duration = 0.0;

  friend bool operator==( const TrialSummary &, const TrialSummary & ) = default;
};

/// Mean over scored frames. Throws Error("empty_trial") when there are none.
TrialSummary summarize( const std::vector<ScoredFrame> & scores, int unscoredCount, double duration );

enum class PlaybackState
{
  playing,
  paused,
};

/// One live trial against a trainer track. Single-writer: feed it from one thread.
class Session
{
public:
  Session( SessionConfig config, Track trainer );

  const SessionConfig & config() const noexcept { return config_; }
  const Track &         trainer() const noexcept { return trainer_; }
  PlaybackState         state() const noexcept { return state_; }

  /// Throws Error("protocol_order") while the current trial has recorded frames.
  void setConfig( const SessionConfig & config );

  void play( double position, double wallClock );
  void pause( double position );
  /// Moves the playhead without changing the play/pause state.
  void seek( double position, double wallClock );

  /// Position clamped to [0, trainer duration]. Throws Error("clock") if the wall clock is
  /// earlier than the playback anchor while playing.
  double playbackPosition( double wallClock ) const;

  /// Records the raw frame, smooths it, aligns the trainer and scores the pair.
  FrameResult processFrame( const TrackFrame & userFrame, double wallClock );

  /// Throws Error("empty_trial") when no frame was scored.
  TrialSummary trialSummary() const;

  /// Drops scores, recording and smoothing state; keeps config, trainer and playback.
  void resetTrial();

  const std::vector<ScoredFrame> & scores() const noexcept { return scores_; }
  const std::vector<TrackFrame> &  recording() const noexcept { return recording_; }
  int                              unscoredCount() const noexcept { return unscored_; }

private:
  double rawPosition( double wallClock ) const;

  SessionConfig            config_;
  Track                    trainer_;
  PlaybackState            state_         = PlaybackState::paused;
  double                   anchorPosition_ = 0.0;
  double                   anchorClock_    = 0.0;
  std::optional<Pose>      smoothedUser_;
  std::vector<ScoredFrame> scores_;
  std::vector<TrackFrame>  recording_;
  int                      unscored_ = 0;
};

struct OffsetResult
{
  double offset;
  double meanError;
};

/// Scores every user frame against the trainer at (t - offset) without smoothing.
std::vector<ScoredFrame> scoreWithOffset( const Track & trainer, const Track & user, double offset,
                                          const MetricConfig & cfg, double tolerance, int * unscored = nullptr );

/// Exhaustive grid search over offsets search_min, search_min + step, ... <= search_max.
/// Returns the offset with the lowest mean error (ties: smallest offset).
/// Throws Error("no_overlap") if no offset scores a single frame.
OffsetResult bestOffset( const Track & trainer, const Track & user, double searchMin, double searchMax,
                         double step, const MetricConfig & cfg, double tolerance = 0.1 );

}  // namespace posefollow
