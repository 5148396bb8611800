// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "posefollow/error.hpp"
#include "posefollow/metric.hpp"
#include "support/synthetic.hpp"

#include <random>

using namespace posefollow;
using namespace posefollow::testing;

TEST_CASE( "keypoint and segment tables" )
{
  CHECK( keypointName( KeypointId::left_wrist ) == "left_wrist" );
  CHECK( keypointFromName( "right_ankle" ) == KeypointId::right_ankle );
  CHECK_FALSE( keypointFromName( "neck" ) );
  CHECK( mirrorOf( KeypointId::nose ) == KeypointId::nose );
  CHECK( mirrorOf( KeypointId::left_ear ) == KeypointId::right_ear );
  CHECK( mirrorOf( KeypointId::right_knee ) == KeypointId::left_knee );
  for ( const auto & seg : kSegments )
  {
    CHECK_FALSE( isHead( seg.from ) );
    CHECK_FALSE( isHead( seg.to ) );
    CHECK( segmentFromName( segmentName( seg.id ) ) == seg.id );
  }
  // The library table and the reference table name the same endpoints.
  for ( std::size_t i = 0; i < kSegmentCount; ++i )
  {
    CHECK( keypointName( kSegments[i].from ) == referenceSegments()[i].first );
    CHECK( keypointName( kSegments[i].to ) == referenceSegments()[i].second );
  }
}

TEST_CASE( "pose validation" )
{
  Pose::Keypoints kps{};
  CHECK_NOTHROW( Pose( kps, 640, 360 ) );
  CHECK_THROWS_AS( Pose( kps, 0, 360 ), DataError );
  kps[3].score = 1.5;
  CHECK_THROWS_AS( Pose( kps, 640, 360 ), DataError );
  kps[3].score = 0.5;
  kps[4].x     = std::nan( "" );
  CHECK_THROWS_AS( Pose( kps, 640, 360 ), DataError );
  kps[4].x = -0.05;  // slightly outside the frame is fine
  CHECK_NOTHROW( Pose( kps, 640, 360 ) );
}

TEST_CASE( "segment_angle" )
{
  const auto & upperArm = segment( SegmentId::upper_arm_l );

  SUBCASE( "vertical vector pointing up on a square frame" )
  {
    Points pts                = stickFigurePoints();
    pts["left_shoulder"]      = { 0.5, 0.5, 1 };
    pts["left_elbow"]         = { 0.5, 0.2, 1 };
    const auto a              = segmentAngle( fromPoints( pts, 500, 500 ), upperArm, true );
    REQUIRE( a );
    CHECK( *a == doctest::Approx( -kPi / 2 ).epsilon( 1e-15 ) );
  }
  SUBCASE( "coincident endpoints are undefined" )
  {
    Points pts           = stickFigurePoints();
    pts["left_shoulder"] = { 0.3, 0.3, 1 };
    pts["left_elbow"]    = { 0.3, 0.3, 1 };
    CHECK_FALSE( segmentAngle( fromPoints( pts ), upperArm, true ) );
    CHECK_FALSE( segmentAngle( fromPoints( pts ), upperArm, false ) );
  }
  SUBCASE( "horizontal vector is 0 with or without aspect correction" )
  {
    Points pts           = stickFigurePoints();
    pts["left_shoulder"] = { 0.2, 0.5, 1 };
    pts["left_elbow"]    = { 0.4, 0.5, 1 };
    CHECK( *segmentAngle( fromPoints( pts, 640, 360 ), upperArm, true ) == 0.0 );
    CHECK( *segmentAngle( fromPoints( pts, 640, 360 ), upperArm, false ) == 0.0 );
  }
  SUBCASE( "aspect correction changes diagonal angles on wide frames" )
  {
    Points pts           = stickFigurePoints();
    pts["left_shoulder"] = { 0.0, 0.0, 1 };
    pts["left_elbow"]    = { 0.1, 0.1, 1 };
    CHECK( *segmentAngle( fromPoints( pts, 640, 360 ), upperArm, false ) == doctest::Approx( kPi / 4 ) );
    CHECK( *segmentAngle( fromPoints( pts, 640, 360 ), upperArm, true ) == doctest::Approx( std::atan2( 36.0, 64.0 ) ) );
  }
  SUBCASE( "range is (-pi, pi]" )
  {
    Points pts           = stickFigurePoints();
    pts["left_shoulder"] = { 0.5, 0.5, 1 };
    pts["left_elbow"]    = { 0.2, 0.5, 1 };
    CHECK( *segmentAngle( fromPoints( pts ), upperArm, true ) == doctest::Approx( kPi ) );
  }
}

TEST_CASE( "angle_diff" )
{
  CHECK( angleDiff( 0.1, 0.1 ) == 0.0 );
  const double deg = kPi / 180.0;
  CHECK( angleDiff( 350 * deg, 10 * deg ) == doctest::Approx( 20 * deg ).epsilon( 1e-12 ) );
  CHECK( angleDiff( 350 * deg, 10 * deg ) == doctest::Approx( 0.3491 ).epsilon( 1e-4 ) );
  CHECK( angleDiff( -kPi, kPi ) == doctest::Approx( 0.0 ) );
  CHECK( angleDiff( 0.0, kPi ) == doctest::Approx( kPi ) );
  CHECK( angleDiff( 1.0, -1.0 ) == doctest::Approx( 2.0 ) );
  CHECK( angleDiff( 3.0, -3.0 ) == doctest::Approx( 2 * kPi - 6.0 ) );

  std::mt19937_64                        rng( 7 );
  std::uniform_real_distribution<double> u( -10.0, 10.0 );
  for ( int i = 0; i < 1000; ++i )
  {
    const double a = u( rng ), b = u( rng );
    const double d = angleDiff( a, b );
    REQUIRE( d >= 0.0 );
    REQUIRE( d <= kPi );
    REQUIRE( d == doctest::Approx( angleDiff( b, a ) ) );
  }
}

TEST_CASE( "mirror_pose" )
{
  Points pts        = stickFigurePoints();
  pts["left_wrist"] = { 0.2, 0.4, 0.7 };
  const Pose m      = mirrorPose( fromPoints( pts ) );
  CHECK( m[KeypointId::right_wrist].x == doctest::Approx( 0.8 ) );
  CHECK( m[KeypointId::right_wrist].y == 0.4 );
  CHECK( m[KeypointId::right_wrist].score == 0.7 );
  CHECK( m[KeypointId::nose].x == doctest::Approx( 0.5 ) );
  CHECK( m.frameWidth() == 640 );

  SUBCASE( "involution" )
  {
    std::mt19937_64 rng( 11 );
    for ( int i = 0; i < 200; ++i )
    {
      const Pose p  = randomPose( rng, 640, 360, false );
      const Pose mm = mirrorPose( mirrorPose( p ) );
      for ( std::size_t k = 0; k < kKeypointCount; ++k )
      {
        REQUIRE( mm.keypoints()[k].x == doctest::Approx( p.keypoints()[k].x ).epsilon( 1e-15 ) );
        REQUIRE( mm.keypoints()[k].y == p.keypoints()[k].y );
        REQUIRE( mm.keypoints()[k].score == p.keypoints()[k].score );
      }
    }
  }
  SUBCASE( "symmetric pose is a fixed point" )
  {
    // Stick figure is symmetric about x = 0.5 except the ears/eyes, which are symmetric too.
    const Pose p = stickFigure();
    const Pose q = mirrorPose( p );
    for ( std::size_t k = 0; k < kKeypointCount; ++k )
      CHECK( q.keypoints()[k].x == doctest::Approx( p.keypoints()[k].x ) );
  }
}

TEST_CASE( "frame_error examples" )
{
  MetricConfig noMirror;
  noMirror.mirrorUser = false;

  SUBCASE( "identity" )
  {
    const Pose p = stickFigure();
    const auto s = frameError( p, p, noMirror );
    CHECK( s.validCount == 10 );
    REQUIRE( s.meanError );
    CHECK( *s.meanError == 0.0 );
    for ( const auto & e : s.perSegment )
      CHECK( e == 0.0 );
  }

  SUBCASE( "lower arm rotated 90 degrees about the elbow" )
  {
    Points       pts = stickFigurePoints();
    const auto   e   = pts["left_elbow"];
    const auto   w   = pts["left_wrist"];
    // Rotate the elbow->wrist vector by +90 degrees in pixel space.
    const double px = ( w[0] - e[0] ) * 640, py = ( w[1] - e[1] ) * 360;
    pts["left_wrist"] = { e[0] - py / 640, e[1] + px / 360, 1 };
    const Pose trainer = stickFigure();
    const Pose user    = fromPoints( pts );

    // Frozen from the reference evaluator.
    const auto ref = referenceScore( trainer, user, 0.3, false, true );
    REQUIRE( ref.valid == 10 );
    CHECK( *ref.perSegment[index( SegmentId::lower_arm_l )] == doctest::Approx( kPi / 2 ).epsilon( 1e-12 ) );
    CHECK( *ref.mean == doctest::Approx( kPi / 20 ).epsilon( 1e-12 ) );

    const auto s = frameError( trainer, user, noMirror );
    CHECK( s.validCount == 10 );
    CHECK( *s.perSegment[index( SegmentId::lower_arm_l )] == doctest::Approx( kPi / 2 ).epsilon( 1e-12 ) );
    for ( const auto & seg : kSegments )
      if ( seg.id != SegmentId::lower_arm_l )
        CHECK( *s.perSegment[index( seg.id )] == 0.0 );
    CHECK( *s.meanError == doctest::Approx( 0.1571 ).epsilon( 1e-3 ) );
    CHECK( *s.meanError == doctest::Approx( kPi / 20 ).epsilon( 1e-12 ) );
  }

  SUBCASE( "low-confidence wrist drops the lower arm" )
  {
    Points pts        = stickFigurePoints();
    pts["left_wrist"][2] = 0.1;
    const auto s      = frameError( stickFigure(), fromPoints( pts ), noMirror );
    CHECK( s.validCount == 9 );
    CHECK_FALSE( s.perSegment[index( SegmentId::lower_arm_l )] );
  }

  SUBCASE( "threshold is inclusive" )
  {
    Points pts           = stickFigurePoints();
    pts["left_wrist"][2] = 0.3;
    CHECK( frameError( stickFigure(), fromPoints( pts ), noMirror ).validCount == 10 );
  }

  SUBCASE( "degenerate segment excluded, never NaN" )
  {
    Points pts        = stickFigurePoints();
    pts["left_knee"]  = pts["left_hip"];
    const auto s      = frameError( stickFigure(), fromPoints( pts ), noMirror );
    CHECK( s.validCount == 9 );
    CHECK_FALSE( s.perSegment[index( SegmentId::upper_leg_l )] );
    CHECK( std::isfinite( *s.meanError ) );
  }

  SUBCASE( "no valid segment means no mean" )
  {
    Points pts = stickFigurePoints();
    for ( auto & [name, v] : pts )
      v[2] = 0.0;
    const auto s = frameError( stickFigure(), fromPoints( pts ), noMirror );
    CHECK( s.validCount == 0 );
    CHECK_FALSE( s.meanError );
  }

  SUBCASE( "mirrored comparison against own mirror image is zero" )
  {
    std::mt19937_64 rng( 5 );
    MetricConfig    mirror;
    for ( int i = 0; i < 100; ++i )
    {
      const Pose p = randomPose( rng, 640, 360 );
      const auto s = frameError( p, mirrorPose( p ), mirror );
      REQUIRE( s.meanError );
      REQUIRE( *s.meanError == doctest::Approx( 0.0 ).epsilon( 1e-12 ) );
    }
  }
}

TEST_CASE( "frame_error matches the reference evaluator on random poses" )
{
  std::mt19937_64 rng( 1234 );
  for ( int i = 0; i < 500; ++i )
  {
    MetricConfig cfg;
    cfg.mirrorUser    = i % 2 == 0;
    cfg.aspectCorrect = i % 3 != 0;
    const Pose a      = randomPose( rng, 640, 360, false );
    const Pose b      = randomPose( rng, 640, 360, false );
    const auto s      = frameError( a, b, cfg );
    const auto ref    = referenceScore( a, b, cfg.confidenceThreshold, cfg.mirrorUser, cfg.aspectCorrect );
    REQUIRE( s.validCount == ref.valid );
    for ( std::size_t k = 0; k < kSegmentCount; ++k )
    {
      REQUIRE( s.perSegment[k].has_value() == ref.perSegment[k].has_value() );
      if ( s.perSegment[k] )
        REQUIRE( *s.perSegment[k] == doctest::Approx( *ref.perSegment[k] ).epsilon( 1e-9 ) );
    }
  }
}

TEST_CASE( "frame_error is symmetric without mirroring" )
{
  std::mt19937_64 rng( 99 );
  MetricConfig    cfg;
  cfg.mirrorUser = false;
  for ( int i = 0; i < 200; ++i )
  {
    const Pose a = randomPose( rng, 640, 360, false );
    const Pose b = randomPose( rng, 640, 360, false );
    REQUIRE( frameError( a, b, cfg ) == frameError( b, a, cfg ) );
  }
}

TEST_CASE( "metric config validation" )
{
  MetricConfig cfg;
  CHECK_NOTHROW( cfg.validate() );
  cfg.confidenceThreshold = 1.01;
  CHECK_THROWS_AS( cfg.validate(), DataError );
}
