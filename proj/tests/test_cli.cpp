// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "posefollow/cli.hpp"
#include "posefollow/metric.hpp"
#include "posefollow/protocol.hpp"
#include "posefollow/report.hpp"
#include "posefollow/server.hpp"
#include "posefollow/track_io.hpp"
#include "support/line_client.hpp"
#include "support/synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace posefollow;
using namespace posefollow::testing;
namespace fs = std::filesystem;

namespace {

struct Result
{
  int         code;
  std::string out;
  std::string err;
};

Result run( std::vector<std::string> args )
{
  std::ostringstream out, err;
  const int          code = cli::run( args, out, err );
  return { code, out.str(), err.str() };
}

fs::path scratch()
{
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ( "posefollow-cli-" + std::to_string( ::getpid() ) );
    fs::remove_all( d );
    fs::create_directories( d );
    return d;
  }();
  return dir;
}

std::string slurp( const fs::path & p )
{
  std::ifstream      in( p, std::ios::binary );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path writeMotion( const std::string & name, double lag, bool mirrored )
{
  TrackMeta meta = trainerMeta();
  if ( mirrored )
  {
    meta.kind      = TrackKind::user_session;
    meta.condition = Condition::C2;
  }
  const auto track = makeTrack( meta, 150, 30.0, [&]( double t ) {
    const Pose p = motionAt( std::max( 0.0, t - lag ) );
    return mirrored ? mirrorPose( p ) : p;
  } );
  const auto path = scratch() / name;
  writeTrackFile( track, path );
  return path;
}

}  // namespace

TEST_CASE( "usage errors" )
{
  CHECK( run( {} ).code == cli::kUsageError );
  CHECK( run( { "frobnicate" } ).code == cli::kUsageError );
  CHECK( run( { "score", "--trainer", "a", "--user", "b", "--bogus" } ).code == cli::kUsageError );
  CHECK( run( { "latin-square", "--k", "1", "--replicates", "1" } ).code == cli::kUsageError );
  CHECK( run( { "score", "--help" } ).code == cli::kOk );
}

TEST_CASE( "score" )
{
  const auto trainer = writeMotion( "trainer.poses.jsonl", 0.0, false );
  const auto user    = writeMotion( "user.poses.jsonl", 0.0, true );

  SUBCASE( "trainer vs its mirror image scores zero" )
  {
    const auto r = run( { "score", "--trainer", trainer.string(), "--user", user.string() } );
    CHECK( r.code == cli::kOk );
    const auto at = r.out.find( "mean_error_rad = " );
    REQUIRE( at != std::string::npos );
    CHECK( std::stod( r.out.substr( at + 17 ) ) < 1e-12 );
    CHECK( r.out.find( "frames_scored = 150\n" ) != std::string::npos );
  }
  SUBCASE( "auto offset recovers the lag" )
  {
    const auto lagged = writeMotion( "lagged.poses.jsonl", 0.5, true );
    const auto r      = run( { "score", "--trainer", trainer.string(), "--user", lagged.string(), "--offset", "auto" } );
    REQUIRE( r.code == cli::kOk );
    const auto   line   = r.out.substr( 0, r.out.find( '\n' ) );
    const double offset = std::stod( line.substr( line.find( '=' ) + 1 ) );
    CHECK( std::abs( offset - 0.5 ) <= 1.0 / 30 + 1e-9 );
  }
  SUBCASE( "report output" )
  {
    const auto csv = scratch() / "score.csv";
    const auto r   = run( { "score", "--trainer", trainer.string(), "--user", user.string(), "--participant", "P4", "--out",
                            csv.string() } );
    REQUIRE( r.code == cli::kOk );
    const auto text = slurp( csv );
    CHECK( text.find( "\r\nP4,C2," ) != std::string::npos );
    CHECK( text.find( ",150,0," ) != std::string::npos );
  }
  SUBCASE( "bad offset" )
  {
    CHECK( run( { "score", "--trainer", trainer.string(), "--user", user.string(), "--offset", "soon" } ).code
           == cli::kUsageError );
  }
  SUBCASE( "missing file is a data error" )
  {
    const auto r = run( { "score", "--trainer", trainer.string(), "--user", ( scratch() / "nope.jsonl" ).string() } );
    CHECK( r.code == cli::kDataError );
    CHECK( r.err.rfind( "error[", 0 ) == 0 );
  }
  SUBCASE( "malformed file reports the line" )
  {
    std::ifstream            in( user );
    std::vector<std::string> lines;
    for ( std::string l; std::getline( in, l ); )
      lines.push_back( l );
    lines[7] = lines[6];
    const auto    bad = scratch() / "bad.poses.jsonl";
    std::ofstream o( bad );
    for ( const auto & l : lines )
      o << l << '\n';
    o.close();
    const auto r = run( { "score", "--trainer", trainer.string(), "--user", bad.string() } );
    CHECK( r.code == cli::kDataError );
    CHECK( r.err.find( "line 8:" ) != std::string::npos );
  }
}

TEST_CASE( "latin-square" )
{
  const auto r = run( { "latin-square", "--k", "4", "--replicates", "3" } );
  REQUIRE( r.code == cli::kOk );
  std::istringstream in( r.out );
  const auto         csv = readCsv( in );
  CHECK( csv.header == std::vector<std::string>{ "participant", "position_1", "position_2", "position_3", "position_4" } );
  REQUIRE( csv.rows.size() == 12 );
  CHECK( csv.rows[0] == std::vector<std::string>{ "1", "C1", "C2", "C4", "C3" } );
}

TEST_CASE( "analyze" )
{
  // 12 x 4 report with a clear C2 effect.
  std::vector<ScoreReportRow>      rows;
  std::mt19937_64                  rng( 3 );
  std::normal_distribution<double> noise( 0.0, 0.02 );
  for ( int p = 0; p < 12; ++p )
    for ( int c = 0; c < 4; ++c )
    {
      ScoreReportRow row;
      row.participant  = "P" + std::to_string( p + 1 );
      row.condition    = static_cast<Condition>( c );
      row.meanError    = ( c == 1 ? 0.10 : 0.20 ) + noise( rng );
      row.framesScored = 1800;
      row.tlx.fill( 10.0 );
      rows.push_back( row );
    }
  const auto report = scratch() / "study.csv";
  exportReportFile( rows, report );

  const auto anova = run( { "analyze", "anova", "--input", report.string(), "--measure", "mean_error_rad" } );
  REQUIRE( anova.code == cli::kOk );
  CHECK( anova.out.find( "df = (3, 33)" ) != std::string::npos );
  CHECK( anova.out.find( "C1,C2," ) != std::string::npos );

  const auto tlx = run( { "analyze", "tlx", "--input", report.string() } );
  REQUIRE( tlx.code == cli::kOk );
  CHECK( tlx.out.find( "C3,50,12" ) != std::string::npos );

  // Constant TLX has no error variance.
  const auto flat = run( { "analyze", "anova", "--input", report.string(), "--measure", "tlx_overall" } );
  CHECK( flat.code == cli::kDataError );
  CHECK( flat.err.find( "degenerate" ) != std::string::npos );

  const auto ranksFile = scratch() / "ranks.csv";
  {
    std::ofstream o( ranksFile );
    o << "participant,condition,rank\n";
    for ( int p = 0; p < 12; ++p )
      for ( int c = 0; c < 4; ++c )
        o << "P" << p << ",C" << c + 1 << "," << ( ( c + 1 ) % 4 ) + 1 << "\n";
  }
  const auto ranks = run( { "analyze", "ranks", "--input", ranksFile.string() } );
  REQUIRE( ranks.code == cli::kOk );
  CHECK( ranks.out.find( "C4,12" ) != std::string::npos );
  CHECK( ranks.out.find( "ordering (best first): C4 C1 C2 C3" ) != std::string::npos );
}

TEST_CASE( "replay of a recorded live session matches byte for byte" )
{
  const auto trainerPath = writeMotion( "live-trainer.poses.jsonl", 0.0, false );
  const auto trainer     = std::make_shared<const Track>( readTrackFile( trainerPath ) );
  const auto recordDir   = scratch() / "rec";
  fs::create_directories( recordDir );

  LineServer server( ServerOptions{ "127.0.0.1", 0, trainer, trainerPath.string(), recordDir } );
  const auto port = server.start();
  {
    LineClient client( port );
    client.request( R"({"type":"hello","protocol_version":1,"frame_width":640,"frame_height":360,"participant":"P11"})" );
    client.request( R"({"type":"configure","condition":"C3","smoothing_alpha":0.5})" );
    client.request( R"({"type":"play","position":0})" );
    for ( int i = 0; i < 45; ++i )
    {
      const double t = i / 30.0;
      client.request( protocol::encodeClient( protocol::msg::Frame{ t, mirrorPose( motionAt( t + 0.05 ) ).keypoints() } ) );
    }
    REQUIRE( json::Json::parse( client.request( R"({"type":"end_trial"})" ) )["type"] == "summary" );
  }
  server.stop();

  const auto liveCsv = recordDir / "session-1-1.summary.csv";
  REQUIRE( fs::exists( liveCsv ) );
  const auto replayCsv = scratch() / "replayed.csv";
  const auto r = run( { "replay", "--session", ( recordDir / "session-1-1.poses.jsonl" ).string(), "--out", replayCsv.string() } );
  REQUIRE( r.code == cli::kOk );
  CHECK( slurp( replayCsv ) == slurp( liveCsv ) );
  CHECK( slurp( liveCsv ).find( "P11,C3," ) != std::string::npos );
}
