// SPDX-License-Identifier: Apache-2.0
#include "posefollow/session.hpp"

#include "posefollow/error.hpp"

#include <algorithm>
#include <cmath>

namespace posefollow {

const TrackFrame * align( const Track & trainer, double position, double tolerance )
{
  const auto frames = trainer.frames();
  const auto it     = std::lower_bound( frames.begin(), frames.end(), position,
                                        []( const TrackFrame & f, double p ) { return f.t < p; } );

  const TrackFrame * best = nullptr;
  double             bestDist = 0.0;
  if ( it != frames.begin() )
  {
    best     = &*std::prev( it );
    bestDist = std::abs( position - best->t );
  }
  if ( it != frames.end() )
  {
    const double d = std::abs( it->t - position );
    if ( best == nullptr || d < bestDist )
    {
      best     = &*it;
      bestDist = d;
    }
  }
  if ( best == nullptr || bestDist > tolerance )
    return nullptr;
  return best;
}

Pose smooth( const std::optional<Pose> & prev, const Pose & next, double alpha )
{
  if ( !prev || alpha == 1.0 )
    return next;
  Pose::Keypoints out = next.keypoints();
  for ( std::size_t i = 0; i < kKeypointCount; ++i )
  {
    const auto & p = prev->keypoints()[i];
    out[i].x       = alpha * out[i].x + ( 1.0 - alpha ) * p.x;
    out[i].y       = alpha * out[i].y + ( 1.0 - alpha ) * p.y;
  }
  return Pose( out, next.frameWidth(), next.frameHeight() );
}

TrialSummary summarize( const std::vector<ScoredFrame> & scores, int unscoredCount, double duration )
{
  if ( scores.empty() )
    throw Error( "empty_trial", "trial has no scored frames" );

  TrialSummary                        summary;
  std::array<double, kSegmentCount>   segSum{};
  std::array<int, kSegmentCount>      segCount{};
  double                              sum = 0.0;
  for ( const auto & s : scores )
  {
    sum += *s.score.meanError;
    for ( std::size_t i = 0; i < kSegmentCount; ++i )
    {
      if ( const auto & e = s.score.perSegment[i] )
      {
        segSum[i] += *e;
        ++segCount[i];
      }
    }
  }
  summary.meanError     = sum / static_cast<double>( scores.size() );
  summary.frameCount    = static_cast<int>( scores.size() );
  summary.unscoredCount = unscoredCount;
  summary.duration      = duration;
  for ( std::size_t i = 0; i < kSegmentCount; ++i )
    if ( segCount[i] > 0 )
      summary.perSegmentMeans[i] = segSum[i] / segCount[i];
  return summary;
}

namespace {

void checkPosition( double position )
{
  if ( !( std::isfinite( position ) && position >= 0.0 ) )
    throw DataError( "invalid_position", "playback position must be finite and non-negative" );
}

}  // namespace

Session::Session( SessionConfig config, Track trainer ) : config_( config ), trainer_( std::move( trainer ) )
{
  config_.validate();
}

void Session::setConfig( const SessionConfig & config )
{
  if ( !recording_.empty() )
    throw Error( "protocol_order", "cannot reconfigure during a trial" );
  config.validate();
  config_ = config;
}

void Session::play( double position, double wallClock )
{
  checkPosition( position );
  state_          = PlaybackState::playing;
  anchorPosition_ = position;
  anchorClock_    = wallClock;
}

void Session::pause( double position )
{
  checkPosition( position );
  state_          = PlaybackState::paused;
  anchorPosition_ = position;
}

void Session::seek( double position, double wallClock )
{
  checkPosition( position );
  anchorPosition_ = position;
  anchorClock_    = wallClock;
}

double Session::rawPosition( double wallClock ) const
{
  if ( state_ == PlaybackState::paused )
    return anchorPosition_;
  if ( wallClock < anchorClock_ )
    throw Error( "clock", "clock went backwards" );
  return anchorPosition_ + ( wallClock - anchorClock_ );
}

double Session::playbackPosition( double wallClock ) const
{
  return std::clamp( rawPosition( wallClock ), 0.0, trainer_.duration() );
}

FrameResult Session::processFrame( const TrackFrame & userFrame, double wallClock )
{
  if ( !recording_.empty() && !( userFrame.t > recording_.back().t ) )
    throw DataError( "timestamp_order", "user frame timestamps must strictly increase" );

  // Unclamped: once the video has ended, frames stop aligning.
  const double position = rawPosition( wallClock );

  TrackFrame raw = userFrame;
  raw.playback   = position;
  recording_.push_back( std::move( raw ) );

  smoothedUser_ = smooth( smoothedUser_, userFrame.pose, config_.smoothingAlpha );

  const TrackFrame * trainerFrame = align( trainer_, position, config_.alignTolerance );
  if ( trainerFrame == nullptr )
  {
    ++unscored_;
    return Unscored{ "no_trainer_frame" };
  }
  FrameScore score = frameError( trainerFrame->pose, *smoothedUser_, config_.metric );
  if ( score.validCount == 0 )
  {
    ++unscored_;
    return Unscored{ "no_valid_segments" };
  }
  scores_.push_back( { userFrame.t, trainerFrame->t, score } );
  return score;
}

TrialSummary Session::trialSummary() const
{
  const double duration = recording_.empty() ? 0.0 : recording_.back().t - recording_.front().t;
  return summarize( scores_, unscored_, duration );
}

void Session::resetTrial()
{
  smoothedUser_.reset();
  scores_.clear();
  recording_.clear();
  unscored_ = 0;
}

std::vector<ScoredFrame> scoreWithOffset( const Track & trainer, const Track & user, double offset,
                                          const MetricConfig & cfg, double tolerance, int * unscored )
{
  std::vector<ScoredFrame> out;
  int                      missed = 0;
  for ( const auto & frame : user.frames() )
  {
    const TrackFrame * match = align( trainer, frame.t - offset, tolerance );
    if ( match == nullptr )
    {
      ++missed;
      continue;
    }
    FrameScore score = frameError( match->pose, frame.pose, cfg );
    if ( score.validCount == 0 )
    {
      ++missed;
      continue;
    }
    out.push_back( { frame.t, match->t, score } );
  }
  if ( unscored != nullptr )
    *unscored = missed;
  return out;
}

OffsetResult bestOffset( const Track & trainer, const Track & user, double searchMin, double searchMax, double step,
                         const MetricConfig & cfg, double tolerance )
{
  if ( !( searchMin <= searchMax ) || !( step > 0.0 ) )
    throw Error( "invalid_argument", "offset search needs search_min <= search_max and step > 0" );

  // Small slack so a bound that is a whole number of steps away is not lost to rounding.
  const auto steps = static_cast<long>( std::floor( ( searchMax - searchMin ) / step + 1e-9 ) );

  std::optional<OffsetResult> best;
  for ( long i = 0; i <= steps; ++i )
  {
    const double offset = searchMin + static_cast<double>( i ) * step;
    const auto   scored = scoreWithOffset( trainer, user, offset, cfg, tolerance );
    if ( scored.empty() )
      continue;
    double sum = 0.0;
    for ( const auto & s : scored )
      sum += *s.score.meanError;
    const double mean = sum / static_cast<double>( scored.size() );
    if ( !best || mean < best->meanError )
      best = OffsetResult{ offset, mean };
  }
  if ( !best )
    throw Error( "no_overlap", "no offset in the search range scores any frame" );
  return *best;
}

}  // namespace posefollow
