// SPDX-License-Identifier: Apache-2.0
#include "posefollow/json_codec.hpp"

#include "posefollow/error.hpp"

#include <bitset>
#include <string>

namespace posefollow::json {

namespace {

[[noreturn]] void schemaError( const std::string & what )
{
  throw DataError( "schema", what );
}

}  // namespace

const Json & requireField( const Json & j, const char * field )
{
  if ( !j.is_object() )
    schemaError( "expected an object" );
  const auto it = j.find( field );
  if ( it == j.end() )
    schemaError( std::string( "missing field '" ) + field + "'" );
  return *it;
}

double requireNumber( const Json & j, const char * field )
{
  const auto & v = requireField( j, field );
  if ( !v.is_number() )
    schemaError( std::string( "field '" ) + field + "' must be a number" );
  return v.get<double>();
}

int requireInt( const Json & j, const char * field )
{
  const auto & v = requireField( j, field );
  if ( !v.is_number_integer() )
    schemaError( std::string( "field '" ) + field + "' must be an integer" );
  return v.get<int>();
}

bool requireBool( const Json & j, const char * field )
{
  const auto & v = requireField( j, field );
  if ( !v.is_boolean() )
    schemaError( std::string( "field '" ) + field + "' must be a boolean" );
  return v.get<bool>();
}

std::string requireString( const Json & j, const char * field )
{
  const auto & v = requireField( j, field );
  if ( !v.is_string() )
    schemaError( std::string( "field '" ) + field + "' must be a string" );
  return v.get<std::string>();
}

Json encodeKeypoints( const Pose & pose )
{
  Json out = Json::array();
  for ( std::size_t i = 0; i < kKeypointCount; ++i )
  {
    const auto & kp = pose.keypoints()[i];
    out.push_back( Json::array( { keypointName( static_cast<KeypointId>( i ) ), kp.x, kp.y, kp.score } ) );
  }
  return out;
}

Pose decodeKeypoints( const Json & j, double frameWidth, double frameHeight )
{
  if ( !j.is_array() )
    schemaError( "keypoints must be an array" );
  if ( j.size() != kKeypointCount )
    schemaError( "expected 17 keypoints, got " + std::to_string( j.size() ) );

  Pose::Keypoints             kps{};
  std::bitset<kKeypointCount> seen;
  for ( const auto & entry : j )
  {
    if ( !entry.is_array() || entry.size() != 4 || !entry[0].is_string() || !entry[1].is_number()
         || !entry[2].is_number() || !entry[3].is_number() )
      schemaError( "keypoint entries must be [name, x, y, score]" );
    const auto name = entry[0].get<std::string>();
    const auto id   = keypointFromName( name );
    if ( !id )
      schemaError( "unknown keypoint '" + name + "'" );
    if ( seen.test( index( *id ) ) )
      schemaError( "duplicate keypoint '" + name + "'" );
    seen.set( index( *id ) );
    kps[index( *id )] = Keypoint{ entry[1].get<double>(), entry[2].get<double>(), entry[3].get<double>() };
  }
  return Pose( kps, frameWidth, frameHeight );
}

Json encodeConfig( const SessionConfig & cfg )
{
  Json metric = Json::object();
  metric["confidence_threshold"] = cfg.metric.confidenceThreshold;
  metric["mirror_user"]          = cfg.metric.mirrorUser;
  metric["aspect_correct"]       = cfg.metric.aspectCorrect;

  Json out               = Json::object();
  out["condition"]       = conditionName( cfg.condition );
  out["metric"]          = metric;
  out["align_tolerance"] = cfg.alignTolerance;
  out["smoothing_alpha"] = cfg.smoothingAlpha;
  out["show_error_live"] = cfg.showErrorLive;
  return out;
}

SessionConfig decodeConfig( const Json & j, SessionConfig base )
{
  if ( !j.is_object() )
    schemaError( "config must be an object" );
  if ( j.contains( "condition" ) )
  {
    const auto name = requireString( j, "condition" );
    const auto c    = conditionFromName( name );
    if ( !c )
      schemaError( "unknown condition '" + name + "'" );
    base.condition = *c;
  }
  if ( j.contains( "metric" ) )
  {
    const auto & m = j["metric"];
    if ( !m.is_object() )
      schemaError( "field 'metric' must be an object" );
    if ( m.contains( "confidence_threshold" ) )
      base.metric.confidenceThreshold = requireNumber( m, "confidence_threshold" );
    if ( m.contains( "mirror_user" ) )
      base.metric.mirrorUser = requireBool( m, "mirror_user" );
    if ( m.contains( "aspect_correct" ) )
      base.metric.aspectCorrect = requireBool( m, "aspect_correct" );
  }
  if ( j.contains( "align_tolerance" ) )
    base.alignTolerance = requireNumber( j, "align_tolerance" );
  if ( j.contains( "smoothing_alpha" ) )
    base.smoothingAlpha = requireNumber( j, "smoothing_alpha" );
  if ( j.contains( "show_error_live" ) )
    base.showErrorLive = requireBool( j, "show_error_live" );
  base.validate();
  return base;
}

Json encodeMeta( const TrackMeta & meta )
{
  Json out               = Json::object();
  out["format_version"]  = meta.formatVersion;
  out["kind"]            = meta.kind == TrackKind::trainer ? "trainer" : "user_session";
  out["frame_width"]     = meta.frameWidth;
  out["frame_height"]    = meta.frameHeight;
  out["nominal_fps"]     = meta.nominalFps;
  out["source_uri"]      = meta.sourceUri;
  out["created_at"]      = meta.createdAt;
  out["keypoint_schema"] = meta.keypointSchema;
  if ( meta.condition )
    out["condition"] = conditionName( *meta.condition );
  if ( meta.session )
  {
    Json s            = Json::object();
    s["participant"]  = meta.session->participant;
    s["trainer_path"] = meta.session->trainerPath;
    s["config"]       = encodeConfig( meta.session->config );
    out["session"]    = s;
  }
  return out;
}

TrackMeta decodeMeta( const Json & j )
{
  TrackMeta meta;
  meta.formatVersion = requireInt( j, "format_version" );
  if ( meta.formatVersion != 1 )
    throw DataError( "unsupported_version", "unsupported format_version " + std::to_string( meta.formatVersion ) );

  const auto kind = requireString( j, "kind" );
  if ( kind == "trainer" )
    meta.kind = TrackKind::trainer;
  else if ( kind == "user_session" )
    meta.kind = TrackKind::user_session;
  else
    schemaError( "unknown kind '" + kind + "'" );

  meta.frameWidth     = requireInt( j, "frame_width" );
  meta.frameHeight    = requireInt( j, "frame_height" );
  meta.nominalFps     = requireNumber( j, "nominal_fps" );
  meta.sourceUri      = requireString( j, "source_uri" );
  meta.createdAt      = requireString( j, "created_at" );
  meta.keypointSchema = requireString( j, "keypoint_schema" );
  if ( j.contains( "condition" ) )
  {
    const auto name = requireString( j, "condition" );
    meta.condition  = conditionFromName( name );
    if ( !meta.condition )
      schemaError( "unknown condition '" + name + "'" );
  }
  if ( j.contains( "session" ) )
  {
    const auto & s = j["session"];
    SessionInfo  info;
    info.participant = requireString( s, "participant" );
    info.trainerPath = requireString( s, "trainer_path" );
    info.config      = decodeConfig( requireField( s, "config" ) );
    meta.session     = std::move( info );
  }
  meta.validate();
  return meta;
}

Json encodeFrame( const TrackFrame & frame )
{
  Json out         = Json::object();
  out["t"]         = frame.t;
  out["keypoints"] = encodeKeypoints( frame.pose );
  if ( frame.playback )
    out["playback"] = *frame.playback;
  return out;
}

TrackFrame decodeFrame( const Json & j, const TrackMeta & meta )
{
  const double t    = requireNumber( j, "t" );
  Pose         pose = decodeKeypoints( requireField( j, "keypoints" ), meta.frameWidth, meta.frameHeight );
  std::optional<double> playback;
  if ( j.contains( "playback" ) )
    playback = requireNumber( j, "playback" );
  return TrackFrame{ t, std::move( pose ), playback };
}

Json encodePerSegment( const std::array<std::optional<double>, kSegmentCount> & values )
{
  Json out = Json::object();
  for ( std::size_t i = 0; i < kSegmentCount; ++i )
  {
    const auto name = std::string( segmentName( static_cast<SegmentId>( i ) ) );
    if ( values[i] )
      out[name] = *values[i];
    else
      out[name] = nullptr;
  }
  return out;
}

Json encodeSummary( const TrialSummary & summary )
{
  Json out                 = Json::object();
  out["mean_error"]        = summary.meanError;
  out["frame_count"]       = summary.frameCount;
  out["unscored_count"]    = summary.unscoredCount;
  out["per_segment_means"] = encodePerSegment( summary.perSegmentMeans );
  out["duration"]          = summary.duration;
  return out;
}

}  // namespace posefollow::json
