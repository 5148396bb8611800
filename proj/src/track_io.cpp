// SPDX-License-Identifier: Apache-2.0
#include "posefollow/track_io.hpp"

#include "posefollow/error.hpp"
#include "posefollow/json_codec.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace posefollow {

void writeTrack( const Track & track, std::ostream & out )
{
  out << json::encodeMeta( track.meta() ).dump() << '\n';
  for ( const auto & frame : track.frames() )
    out << json::encodeFrame( frame ).dump() << '\n';
  if ( !out )
    throw Error( "io", "failed writing track" );
}

void writeTrackFile( const Track & track, const std::filesystem::path & path )
{
  std::ofstream out( path, std::ios::binary | std::ios::trunc );
  if ( !out )
    throw Error( "io", "cannot open " + path.string() + " for writing" );
  writeTrack( track, out );
}

namespace {

[[noreturn]] void lineError( std::size_t line, const Error & e )
{
  throw DataError( e.code(), "line " + std::to_string( line ) + ": " + e.what() );
}

json::Json parseLine( const std::string & text, std::size_t line )
{
  try
  {
    return json::Json::parse( text );
  }
  catch ( const json::Json::parse_error & e )
  {
    throw DataError( "parse", "line " + std::to_string( line ) + ": malformed JSON (" + e.what() + ")" );
  }
}

}  // namespace

Track readTrack( std::istream & in )
{
  std::string             text;
  std::size_t             line = 0;
  std::optional<TrackMeta> meta;
  std::vector<TrackFrame> frames;

  while ( std::getline( in, text ) )
  {
    ++line;
    if ( !text.empty() && text.back() == '\r' )
      text.pop_back();
    if ( text.empty() )
      throw DataError( "parse", "line " + std::to_string( line ) + ": empty line" );

    const auto record = parseLine( text, line );
    try
    {
      if ( !meta )
      {
        meta = json::decodeMeta( record );
        continue;
      }
      auto frame = json::decodeFrame( record, *meta );
      if ( !( std::isfinite( frame.t ) && frame.t >= 0.0 ) )
        throw DataError( "schema", "timestamp must be finite and non-negative" );
      if ( !frames.empty() && !( frame.t > frames.back().t ) )
        throw DataError( "schema", "timestamp " + json::Json( frame.t ).dump() + " does not increase" );
      frames.push_back( std::move( frame ) );
    }
    catch ( const Error & e )
    {
      lineError( line, e );
    }
  }
  if ( !meta )
    throw DataError( "schema", "line 1: missing meta record" );
  if ( frames.empty() )
    throw DataError( "schema", "line 2: track has no frames" );
  return Track( std::move( *meta ), std::move( frames ) );
}

Track readTrackFile( const std::filesystem::path & path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw DataError( "io", "cannot open " + path.string() );
  try
  {
    return readTrack( in );
  }
  catch ( const DataError & e )
  {
    throw DataError( e.code(), path.string() + ": " + e.what() );
  }
}

}  // namespace posefollow
