// SPDX-License-Identifier: Apache-2.0
#include "posefollow/cli.hpp"

#include "posefollow/analysis.hpp"
#include "posefollow/error.hpp"
#include "posefollow/protocol.hpp"
#include "posefollow/report.hpp"
#include "posefollow/server.hpp"
#include "posefollow/session.hpp"
#include "posefollow/track_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace posefollow::cli {

namespace {

constexpr double kAutoOffsetMax  = 2.0;
constexpr double kAutoOffsetStep = 1.0 / 30.0;

class UsageError : public Error
{
public:
  explicit UsageError( const std::string & detail ) : Error( "usage", detail ) {}
};

std::string conditionLabel( int index )
{
  return "C" + std::to_string( index + 1 );
}

void printSummary( std::ostream & out, const TrialSummary & s )
{
  out << "mean_error_rad = " << formatNumber( s.meanError ) << '\n';
  out << "frames_scored = " << s.frameCount << '\n';
  out << "frames_unscored = " << s.unscoredCount << '\n';
  out << "duration_s = " << formatNumber( s.duration ) << '\n';
  out << "per_segment_means_rad:\n";
  for ( std::size_t i = 0; i < kSegmentCount; ++i )
  {
    out << "  " << segmentName( static_cast<SegmentId>( i ) ) << " = ";
    if ( s.perSegmentMeans[i] )
      out << formatNumber( *s.perSegmentMeans[i] );
    else
      out << "n/a";
    out << '\n';
  }
}

Condition parseCondition( const std::string & text )
{
  const auto c = conditionFromName( text );
  if ( !c )
    throw UsageError( "unknown condition '" + text + "' (expected C1..C4)" );
  return *c;
}

// --- score -------------------------------------------------------------------

struct ScoreArgs
{
  std::string                trainer;
  std::string                user;
  std::string                offset = "0";
  std::optional<double>      threshold;
  bool                       noMirror = false;
  std::optional<std::string> out;
  std::string                participant = "P1";
  std::optional<std::string> condition;
};

int runScore( const ScoreArgs & a, std::ostream & out )
{
  const Track trainer = readTrackFile( a.trainer );
  const Track user    = readTrackFile( a.user );

  MetricConfig cfg;
  if ( a.threshold )
    cfg.confidenceThreshold = *a.threshold;
  cfg.mirrorUser = !a.noMirror;
  try
  {
    cfg.validate();
  }
  catch ( const DataError & e )
  {
    throw UsageError( e.what() );
  }

  const SessionConfig defaults;
  double              offset = 0.0;
  if ( a.offset == "auto" )
  {
    const auto best = bestOffset( trainer, user, 0.0, kAutoOffsetMax, kAutoOffsetStep, cfg, defaults.alignTolerance );
    offset          = best.offset;
  }
  else
  {
    const auto * end = a.offset.data() + a.offset.size();
    const auto [ptr, ec] = std::from_chars( a.offset.data(), end, offset );
    if ( ec != std::errc() || ptr != end || !std::isfinite( offset ) )
      throw UsageError( "--offset must be 'auto' or a number of seconds" );
  }

  int        unscored = 0;
  const auto scored   = scoreWithOffset( trainer, user, offset, cfg, defaults.alignTolerance, &unscored );
  const auto frames   = user.frames();
  const auto summary  = summarize( scored, unscored, frames.back().t - frames.front().t );

  out << "offset_s = " << formatNumber( offset ) << '\n';
  printSummary( out, summary );

  if ( a.out )
  {
    std::optional<Condition> condition = user.meta().condition;
    if ( a.condition )
      condition = parseCondition( *a.condition );
    if ( !condition )
      throw UsageError( "--out needs a condition: pass --condition or record one in the user track" );
    const ScoreReportRow row = reportRow( a.participant, *condition, summary );
    exportReportFile( std::span( &row, 1 ), *a.out );
  }
  return kOk;
}

// --- serve -------------------------------------------------------------------

struct ServeArgs
{
  std::string                listen;
  std::optional<std::string> trainer;
  std::optional<std::string> recordDir;
};

int runServe( const ServeArgs & a, std::ostream & out )
{
  const auto colon = a.listen.rfind( ':' );
  if ( colon == std::string::npos )
    throw UsageError( "--listen expects <addr>:<port>" );
  ServerOptions opts;
  opts.host             = a.listen.substr( 0, colon );
  const auto portText   = a.listen.substr( colon + 1 );
  unsigned   port       = 0;
  const auto [ptr, ec]  = std::from_chars( portText.data(), portText.data() + portText.size(), port );
  if ( ec != std::errc() || ptr != portText.data() + portText.size() || port > 65535 )
    throw UsageError( "invalid port '" + portText + "'" );
  opts.port = static_cast<std::uint16_t>( port );
  if ( a.trainer )
  {
    opts.trainer     = std::make_shared<const Track>( readTrackFile( *a.trainer ) );
    opts.trainerPath = *a.trainer;
  }
  if ( a.recordDir )
  {
    std::filesystem::create_directories( *a.recordDir );
    opts.recordDir = *a.recordDir;
  }

  // Block termination signals before any server thread exists so only sigwait sees them.
  sigset_t signals;
  sigemptyset( &signals );
  sigaddset( &signals, SIGINT );
  sigaddset( &signals, SIGTERM );
  pthread_sigmask( SIG_BLOCK, &signals, nullptr );

  LineServer server( opts );
  const auto bound = server.start();
  out << "listening on " << opts.host << ':' << bound << std::endl;

  int sig = 0;
  sigwait( &signals, &sig );
  server.stop();
  return kOk;
}

// --- replay ------------------------------------------------------------------

struct ReplayArgs
{
  std::string                session;
  std::optional<std::string> trainer;
  std::optional<std::string> out;
};

int runReplay( const ReplayArgs & a, std::ostream & out )
{
  const Track recording = readTrackFile( a.session );
  const auto & meta     = recording.meta();
  if ( meta.kind != TrackKind::user_session || !meta.session )
    throw DataError( "schema", a.session + ": not a recorded session (missing session info)" );

  std::filesystem::path trainerPath = a.trainer.value_or( meta.session->trainerPath );
  if ( trainerPath.empty() )
    throw DataError( "schema", a.session + ": recording names no trainer; pass --trainer" );
  if ( trainerPath.is_relative() && !a.trainer )
    trainerPath = std::filesystem::path( a.session ).parent_path() / trainerPath;

  const Track trainer = readTrackFile( trainerPath );
  const auto  summary = protocol::replay( recording, trainer );
  printSummary( out, summary );

  if ( a.out )
  {
    const auto               participant = meta.session->participant.empty() ? std::string( "P1" ) : meta.session->participant;
    const ScoreReportRow row = reportRow( participant, meta.session->config.condition, summary );
    exportReportFile( std::span( &row, 1 ), *a.out );
  }
  return kOk;
}

// --- latin-square --------------------------------------------------------------

int runLatinSquare( int k, int replicates, std::ostream & out )
{
  std::vector<std::vector<int>> rows;
  try
  {
    rows = analysis::latinSquare( k, replicates );
  }
  catch ( const Error & e )
  {
    throw UsageError( e.what() );
  }
  std::vector<std::string> header{ "participant" };
  for ( int p = 0; p < k; ++p )
    header.push_back( "position_" + std::to_string( p + 1 ) );
  writeCsvRow( out, header );
  for ( std::size_t r = 0; r < rows.size(); ++r )
  {
    std::vector<std::string> fields{ std::to_string( r + 1 ) };
    for ( int c : rows[r] )
      fields.push_back( conditionLabel( c ) );
    writeCsvRow( out, fields );
  }
  return kOk;
}

// --- analyze -------------------------------------------------------------------

int runAnova( const std::string & input, const std::string & measure, double scaleMax, std::ostream & out )
{
  const auto table = analysis::tableFromCsv( readCsvFile( input ), measure, scaleMax );
  const auto anova = analysis::rmAnova( table );
  const auto tukey = analysis::tukeyHsd( table, anova );

  const auto & conds = table.conditions();
  out << "measure: " << measure << '\n';
  out << "participants: " << table.participantCount() << ", conditions: " << conds.size() << '\n';
  out << "df = (" << anova.dfBetween << ", " << anova.dfError << ")\n";
  out << std::setprecision( 6 );
  out << "F = " << anova.F << '\n';
  out << "p = " << anova.p << '\n';
  out << "ms_error = " << anova.msError << '\n';
  out << "grand_mean = " << anova.grandMean << '\n';
  out << "condition means:\n";
  for ( std::size_t j = 0; j < conds.size(); ++j )
    out << "  " << conds[j] << " = " << anova.conditionMeans[j] << '\n';
  out << "tukey_hsd (alpha = 0.05, q_crit = " << tukey.qCritical << "):\n";
  writeCsvRow( out, std::vector<std::string>{ "a", "b", "mean_diff", "q", "significant" } );
  for ( const auto & p : tukey.pairs )
  {
    std::ostringstream diff, q;
    diff << std::setprecision( 6 ) << p.meanDiff;
    q << std::setprecision( 6 ) << p.q;
    writeCsvRow( out, std::vector<std::string>{ conds[p.i], conds[p.j], diff.str(), q.str(),
                                                p.significantAt05 ? "yes" : "no" } );
  }
  return kOk;
}

int runTlx( const std::string & input, double scaleMax, std::ostream & out )
{
  const auto scores = analysis::tlxByCondition( readCsvFile( input ), scaleMax );
  writeCsvRow( out, std::vector<std::string>{ "condition", "tlx_overall", "n" } );
  for ( const auto & s : scores )
  {
    std::ostringstream v;
    v << std::setprecision( 6 ) << s.mean;
    writeCsvRow( out, std::vector<std::string>{ s.condition, v.str(), std::to_string( s.count ) } );
  }
  return kOk;
}

int runRanks( const std::string & input, std::ostream & out )
{
  const auto in     = analysis::rankingsFromCsv( readCsvFile( input ) );
  const auto result = analysis::rankSum( in.rankings );
  writeCsvRow( out, std::vector<std::string>{ "condition", "rank_total" } );
  for ( std::size_t c = 0; c < in.conditions.size(); ++c )
    writeCsvRow( out, std::vector<std::string>{ in.conditions[c], std::to_string( result.totals[c] ) } );
  out << "ordering (best first):";
  for ( int c : result.ordering )
    out << ' ' << in.conditions[static_cast<std::size_t>( c )];
  out << '\n';
  return kOk;
}

}  // namespace

int run( const std::vector<std::string> & args, std::ostream & out, std::ostream & err )
{
  CLI::App app{ "Pose-following trainer: scoring, live service, replay and study analysis", "posefollow" };
  app.require_subcommand( 1 );

  ScoreArgs score;
  auto *    scoreCmd = app.add_subcommand( "score", "Score a recorded user track against a trainer track" );
  scoreCmd->add_option( "--trainer", score.trainer, "Trainer .poses.jsonl" )->required();
  scoreCmd->add_option( "--user", score.user, "User .poses.jsonl" )->required();
  scoreCmd->add_option( "--offset", score.offset, "Lag in seconds, or 'auto' to search [0, 2] s" );
  scoreCmd->add_option( "--threshold", score.threshold, "Keypoint confidence threshold" );
  scoreCmd->add_flag( "--no-mirror", score.noMirror, "Compare the user unmirrored" );
  scoreCmd->add_option( "--out", score.out, "Write a one-row report CSV" );
  scoreCmd->add_option( "--participant", score.participant, "Participant id for the report" );
  scoreCmd->add_option( "--condition", score.condition, "Condition for the report (C1..C4)" );

  ServeArgs serve;
  auto *    serveCmd = app.add_subcommand( "serve", "Run the live scoring service" );
  serveCmd->add_option( "--listen", serve.listen, "<addr>:<port>" )->required();
  serveCmd->add_option( "--trainer", serve.trainer, "Preloaded trainer .poses.jsonl" );
  serveCmd->add_option( "--record-dir", serve.recordDir, "Directory for session recordings" );

  ReplayArgs replay;
  auto *     replayCmd = app.add_subcommand( "replay", "Re-score a recorded session" );
  replayCmd->add_option( "--session", replay.session, "Recorded session .poses.jsonl" )->required();
  replayCmd->add_option( "--trainer", replay.trainer, "Override the recorded trainer path" );
  replayCmd->add_option( "--out", replay.out, "Write a one-row report CSV" );

  int  k = 0, replicates = 1;
  auto latinCmd = app.add_subcommand( "latin-square", "Print a counterbalanced condition ordering" );
  latinCmd->add_option( "--k", k, "Number of conditions" )->required();
  latinCmd->add_option( "--replicates", replicates, "Copies of the square" )->required();

  auto * analyzeCmd = app.add_subcommand( "analyze", "Study analysis" );
  analyzeCmd->require_subcommand( 1 );
  std::string input, measure;
  double      scaleMax = 20.0;
  auto *      anovaCmd = analyzeCmd->add_subcommand( "anova", "Repeated-measures ANOVA with Tukey HSD" );
  anovaCmd->add_option( "--input", input, "Report CSV" )->required();
  anovaCmd->add_option( "--measure", measure, "Column to analyse (or tlx_overall)" )->required();
  anovaCmd->add_option( "--scale-max", scaleMax, "TLX subscale maximum for tlx_overall" );
  auto * tlxCmd = analyzeCmd->add_subcommand( "tlx", "Per-condition raw TLX" );
  tlxCmd->add_option( "--input", input, "Report CSV" )->required();
  tlxCmd->add_option( "--scale-max", scaleMax, "TLX subscale maximum" );
  auto * ranksCmd = analyzeCmd->add_subcommand( "ranks", "Rank-sum preference totals" );
  ranksCmd->add_option( "--input", input, "participant,condition,rank CSV" )->required();

  try
  {
    std::vector<std::string> reversed( args.rbegin(), args.rend() );
    app.parse( reversed );
  }
  catch ( const CLI::ParseError & e )
  {
    const int code = app.exit( e, out, err );
    return code == 0 ? kOk : kUsageError;
  }

  try
  {
    if ( scoreCmd->parsed() )
      return runScore( score, out );
    if ( serveCmd->parsed() )
      return runServe( serve, out );
    if ( replayCmd->parsed() )
      return runReplay( replay, out );
    if ( latinCmd->parsed() )
      return runLatinSquare( k, replicates, out );
    if ( anovaCmd->parsed() )
      return runAnova( input, measure, scaleMax, out );
    if ( tlxCmd->parsed() )
      return runTlx( input, scaleMax, out );
    if ( ranksCmd->parsed() )
      return runRanks( input, out );
  }
  catch ( const UsageError & e )
  {
    err << "error[" << e.code() << "]: " << e.what() << '\n';
    return kUsageError;
  }
  catch ( const DataError & e )
  {
    err << "error[" << e.code() << "]: " << e.what() << '\n';
    return kDataError;
  }
  catch ( const Error & e )
  {
    // Analysis-level failures on well-formed input are still data problems.
    static const std::vector<std::string> dataCodes{ "empty_trial", "no_overlap", "degenerate", "unsupported" };
    err << "error[" << e.code() << "]: " << e.what() << '\n';
    return std::ranges::find( dataCodes, e.code() ) != dataCodes.end() ? kDataError : kRuntimeError;
  }
  catch ( const std::exception & e )
  {
    err << "error[runtime]: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace posefollow::cli
