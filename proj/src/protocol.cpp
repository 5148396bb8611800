// SPDX-License-Identifier: Apache-2.0
#include "posefollow/protocol.hpp"

#include "posefollow/error.hpp"
#include "posefollow/json_codec.hpp"
#include "posefollow/track_io.hpp"

#include <cmath>

namespace posefollow::protocol {

using json::Json;

namespace {

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

[[noreturn]] void badMessage( const std::string & detail )
{
  throw posefollow::Error( "bad_message", detail );
}

double position( const Json & j )
{
  const double p = json::requireNumber( j, "position" );
  if ( !( std::isfinite( p ) && p >= 0.0 ) )
    badMessage( "position must be finite and non-negative" );
  return p;
}

Track decodeInlineTrack( const Json & j )
{
  const auto & frames = json::requireField( j, "frames" );
  if ( !frames.is_array() )
    badMessage( "track.frames must be an array" );
  TrackMeta               meta = json::decodeMeta( json::requireField( j, "meta" ) );
  std::vector<TrackFrame> out;
  out.reserve( frames.size() );
  for ( const auto & f : frames )
    out.push_back( json::decodeFrame( f, meta ) );
  return Track( std::move( meta ), std::move( out ) );
}

ClientMessage decodeObject( const Json & j )
{
  const auto type = json::requireString( j, "type" );
  if ( type == "hello" )
  {
    msg::Hello h;
    h.protocolVersion = json::requireInt( j, "protocol_version" );
    h.frameWidth      = json::requireInt( j, "frame_width" );
    h.frameHeight     = json::requireInt( j, "frame_height" );
    if ( h.frameWidth <= 0 || h.frameHeight <= 0 )
      badMessage( "frame dimensions must be positive" );
    if ( j.contains( "participant" ) )
      h.participant = json::requireString( j, "participant" );
    return h;
  }
  if ( type == "configure" )
  {
    msg::Configure c;
    for ( const auto & [key, value] : j.items() )
      if ( key != "type" )
        c.patch[key] = value;
    return c;
  }
  if ( type == "load_trainer" )
  {
    msg::LoadTrainer l;
    if ( j.contains( "path" ) )
      l.path = json::requireString( j, "path" );
    else if ( j.contains( "track" ) )
      l.track = std::make_shared<const Track>( decodeInlineTrack( j["track"] ) );
    else
      badMessage( "load_trainer needs 'path' or 'track'" );
    return l;
  }
  if ( type == "play" )
    return msg::Play{ position( j ) };
  if ( type == "pause" )
    return msg::Pause{ position( j ) };
  if ( type == "seek" )
    return msg::Seek{ position( j ) };
  if ( type == "frame" )
  {
    msg::Frame f;
    f.tCapture = json::requireNumber( j, "t_capture" );
    if ( !( std::isfinite( f.tCapture ) && f.tCapture >= 0.0 ) )
      badMessage( "t_capture must be finite and non-negative" );
    f.keypoints = json::decodeKeypoints( json::requireField( j, "keypoints" ), 1.0, 1.0 ).keypoints();
    return f;
  }
  if ( type == "end_trial" )
    return msg::EndTrial{};
  throw posefollow::Error( "unknown_type", "unknown message type '" + type + "'" );
}

}  // namespace

ClientMessage decodeClient( std::string_view line )
{
  Json j;
  try
  {
    j = Json::parse( line );
  }
  catch ( const Json::parse_error & e )
  {
    badMessage( std::string( "malformed JSON: " ) + e.what() );
  }
  if ( !j.is_object() )
    badMessage( "message must be a JSON object" );
  try
  {
    return decodeObject( j );
  }
  catch ( const DataError & e )
  {
    badMessage( e.what() );
  }
}

std::string encodeClient( const ClientMessage & m )
{
  Json j = Json::object();
  std::visit( overloaded{
                [&]( const msg::Hello & h ) {
                  j["type"]             = "hello";
                  j["protocol_version"] = h.protocolVersion;
                  j["frame_width"]      = h.frameWidth;
                  j["frame_height"]     = h.frameHeight;
                  if ( !h.participant.empty() )
                    j["participant"] = h.participant;
                },
                [&]( const msg::Configure & c ) {
                  j["type"] = "configure";
                  for ( const auto & [key, value] : c.patch.items() )
                    j[key] = value;
                },
                [&]( const msg::LoadTrainer & l ) {
                  j["type"] = "load_trainer";
                  if ( l.path )
                    j["path"] = *l.path;
                  else if ( l.track )
                  {
                    Json frames = Json::array();
                    for ( const auto & f : l.track->frames() )
                      frames.push_back( json::encodeFrame( f ) );
                    j["track"] = Json{ { "meta", json::encodeMeta( l.track->meta() ) }, { "frames", std::move( frames ) } };
                  }
                },
                [&]( const msg::Play & p ) {
                  j["type"]     = "play";
                  j["position"] = p.position;
                },
                [&]( const msg::Pause & p ) {
                  j["type"]     = "pause";
                  j["position"] = p.position;
                },
                [&]( const msg::Seek & p ) {
                  j["type"]     = "seek";
                  j["position"] = p.position;
                },
                [&]( const msg::Frame & f ) {
                  j["type"]      = "frame";
                  j["t_capture"] = f.tCapture;
                  j["keypoints"] = json::encodeKeypoints( Pose( f.keypoints, 1.0, 1.0 ) );
                },
                [&]( const msg::EndTrial & ) { j["type"] = "end_trial"; },
              },
              m );
  return j.dump();
}

std::string encodeServer( const ServerMessage & m )
{
  Json j = Json::object();
  std::visit( overloaded{
                [&]( const msg::Welcome & w ) {
                  j["type"]             = "welcome";
                  j["protocol_version"] = w.protocolVersion;
                },
                [&]( const msg::Ack & a ) {
                  j["type"] = "ack";
                  j["of"]   = a.of;
                },
                [&]( const msg::Score & s ) {
                  j["type"]        = "score";
                  j["user_t"]      = s.userT;
                  j["trainer_t"]   = s.trainerT;
                  j["per_segment"] = json::encodePerSegment( s.score.perSegment );
                  j["mean"]        = s.score.meanError ? Json( *s.score.meanError ) : Json( nullptr );
                  j["valid_count"] = s.score.validCount;
                },
                [&]( const msg::Scored & s ) {
                  j["type"]   = "scored";
                  j["user_t"] = s.userT;
                },
                [&]( const msg::Unscored & u ) {
                  j["type"]   = "unscored";
                  j["user_t"] = u.userT;
                  j["reason"] = u.reason;
                },
                [&]( const msg::Summary & s ) {
                  j["type"] = "summary";
                  const Json body = json::encodeSummary( s.summary );
                  for ( const auto & [key, value] : body.items() )
                    j[key] = value;
                },
                [&]( const msg::Error & e ) {
                  j["type"]   = "error";
                  j["code"]   = e.code;
                  j["detail"] = e.detail;
                },
              },
              m );
  return j.dump();
}

Connection::Connection( std::shared_ptr<const Track> defaultTrainer, std::optional<std::string> trainerPath )
  : trainerPath_( std::move( trainerPath ) )
{
  if ( defaultTrainer )
    session_.emplace( config_, *defaultTrainer );
}

bool Connection::trialInProgress() const
{
  return session_ && !session_->recording().empty();
}

std::vector<ServerMessage> Connection::handle( const ClientMessage & m, double wallClock )
{
  try
  {
    return dispatch( m, wallClock );
  }
  catch ( const posefollow::Error & e )
  {
    return { msg::Error{ e.code(), e.what() } };
  }
}

std::vector<ServerMessage> Connection::dispatch( const ClientMessage & m, double wallClock )
{
  const auto orderError = []( const std::string & detail ) -> std::vector<ServerMessage> {
    return { msg::Error{ "protocol_order", detail } };
  };

  if ( !greeted_ && !std::holds_alternative<msg::Hello>( m ) )
    return orderError( "first message must be hello" );

  return std::visit(
    overloaded{
      [&]( const msg::Hello & h ) -> std::vector<ServerMessage> {
        if ( greeted_ )
          return orderError( "hello already received" );
        if ( h.protocolVersion != kProtocolVersion )
          return { msg::Error{ "unsupported_version",
                               "protocol_version " + std::to_string( h.protocolVersion ) + " is not supported" } };
        greeted_     = true;
        frameWidth_  = h.frameWidth;
        frameHeight_ = h.frameHeight;
        participant_ = h.participant;
        return { msg::Welcome{} };
      },
      [&]( const msg::Configure & c ) -> std::vector<ServerMessage> {
        if ( trialInProgress() )
          return orderError( "configure during a trial" );
        config_ = json::decodeConfig( c.patch, config_ );
        if ( session_ )
          session_->setConfig( config_ );
        return { msg::Ack{ "configure" } };
      },
      [&]( const msg::LoadTrainer & l ) -> std::vector<ServerMessage> {
        if ( trialInProgress() )
          return orderError( "load_trainer during a trial" );
        if ( l.path )
        {
          session_.emplace( config_, readTrackFile( *l.path ) );
          trainerPath_ = *l.path;
        }
        else
        {
          session_.emplace( config_, *l.track );
          trainerPath_.reset();
        }
        return { msg::Ack{ "load_trainer" } };
      },
      [&]( const msg::Play & p ) -> std::vector<ServerMessage> {
        if ( !session_ )
          return orderError( "play before load_trainer" );
        session_->play( p.position, wallClock );
        return { msg::Ack{ "play" } };
      },
      [&]( const msg::Pause & p ) -> std::vector<ServerMessage> {
        if ( !session_ )
          return orderError( "pause before load_trainer" );
        session_->pause( p.position );
        return { msg::Ack{ "pause" } };
      },
      [&]( const msg::Seek & p ) -> std::vector<ServerMessage> {
        if ( !session_ )
          return orderError( "seek before load_trainer" );
        session_->seek( p.position, wallClock );
        return { msg::Ack{ "seek" } };
      },
      [&]( const msg::Frame & f ) -> std::vector<ServerMessage> {
        if ( !session_ )
          return orderError( "frame before load_trainer" );
        TrackFrame frame{ f.tCapture, Pose( f.keypoints, frameWidth_, frameHeight_ ), std::nullopt };
        const auto result = session_->processFrame( frame, wallClock );
        if ( const auto * u = std::get_if<posefollow::Unscored>( &result ) )
          return { msg::Unscored{ f.tCapture, u->reason } };
        if ( !session_->config().showErrorLive )
          return { msg::Scored{ f.tCapture } };
        const auto & last = session_->scores().back();
        return { msg::Score{ last.userT, last.trainerT, last.score } };
      },
      [&]( const msg::EndTrial & ) -> std::vector<ServerMessage> {
        if ( !session_ )
          return orderError( "end_trial before load_trainer" );
        TrialSummary summary;
        try
        {
          summary = session_->trialSummary();
        }
        catch ( const posefollow::Error & e )
        {
          session_->resetTrial();
          return { msg::Error{ e.code(), e.what() } };
        }
        ++trials_;
        if ( callback_ )
        {
          TrackMeta meta;
          meta.kind        = TrackKind::user_session;
          meta.frameWidth  = frameWidth_;
          meta.frameHeight = frameHeight_;
          meta.sourceUri   = session_->trainer().meta().sourceUri;
          meta.condition   = session_->config().condition;
          meta.session     = SessionInfo{ participant_, trainerPath_.value_or( "" ), session_->config() };
          Track recording( std::move( meta ), session_->recording() );
          callback_( CompletedTrial{ trials_, participant_, session_->config(), summary, std::move( recording ),
                                     session_->trainer(), trainerPath_ } );
        }
        session_->resetTrial();
        return { msg::Summary{ summary } };
      },
    },
    m );
}

std::vector<std::string> Connection::handleLine( std::string_view line, double wallClock )
{
  std::vector<ServerMessage> replies;
  try
  {
    replies = handle( decodeClient( line ), wallClock );
  }
  catch ( const posefollow::Error & e )
  {
    replies = { msg::Error{ e.code(), e.what() } };
  }
  std::vector<std::string> out;
  out.reserve( replies.size() );
  for ( const auto & r : replies )
    out.push_back( encodeServer( r ) );
  return out;
}

TrialSummary replay( const Track & recording, const Track & trainer )
{
  const auto & meta = recording.meta();
  if ( meta.kind != TrackKind::user_session || !meta.session )
    throw DataError( "schema", "recording has no session info" );

  Connection conn;
  const auto expect = [&]( const std::vector<std::string> & replies ) -> Json {
    const Json last = Json::parse( replies.back() );
    if ( last["type"] == "error" )
      throw posefollow::Error( last["code"].get<std::string>(), "replay: " + last["detail"].get<std::string>() );
    return last;
  };
  const auto send = [&]( const ClientMessage & m ) { return expect( conn.handleLine( encodeClient( m ), 0.0 ) ); };

  send( msg::Hello{ kProtocolVersion, meta.frameWidth, meta.frameHeight, meta.session->participant } );
  send( msg::Configure{ json::encodeConfig( meta.session->config ) } );

  std::vector<std::string> loaded;
  for ( const auto & r : conn.handle( msg::LoadTrainer{ std::nullopt, std::make_shared<const Track>( trainer ) }, 0.0 ) )
    loaded.push_back( encodeServer( r ) );
  expect( loaded );

  for ( const auto & frame : recording.frames() )
  {
    if ( !frame.playback )
      throw DataError( "schema", "recorded frame at t=" + Json( frame.t ).dump() + " has no playback position" );
    send( msg::Pause{ *frame.playback } );
    send( msg::Frame{ frame.t, frame.pose.keypoints() } );
  }
  const Json summary = send( msg::EndTrial{} );

  TrialSummary out;
  out.meanError     = summary["mean_error"].get<double>();
  out.frameCount    = summary["frame_count"].get<int>();
  out.unscoredCount = summary["unscored_count"].get<int>();
  out.duration      = summary["duration"].get<double>();
  for ( std::size_t i = 0; i < kSegmentCount; ++i )
  {
    const auto & v = summary["per_segment_means"][std::string( segmentName( static_cast<SegmentId>( i ) ) )];
    if ( !v.is_null() )
      out.perSegmentMeans[i] = v.get<double>();
  }
  return out;
}

}  // namespace posefollow::protocol
