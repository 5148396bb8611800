// SPDX-License-Identifier: Apache-2.0
#include "posefollow/report.hpp"

#include "posefollow/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <numbers>
#include <ostream>

namespace posefollow {

std::string formatNumber( double value )
{
  char buf[64];
  const auto [end, ec] = std::to_chars( buf, buf + sizeof buf, value );
  if ( ec != std::errc() )
    throw Error( "io", "number formatting failed" );
  return std::string( buf, end );
}

ScoreReportRow reportRow( std::string participant, Condition condition, const TrialSummary & summary )
{
  ScoreReportRow row;
  row.participant     = std::move( participant );
  row.condition       = condition;
  row.meanError       = summary.meanError;
  row.framesScored    = summary.frameCount;
  row.framesUnscored  = summary.unscoredCount;
  row.perSegmentMeans = summary.perSegmentMeans;
  return row;
}

std::vector<std::string> reportHeader()
{
  std::vector<std::string> header{ "participant", "condition", "mean_error_rad", "frames_scored", "frames_unscored" };
  for ( const auto & seg : kSegments )
    header.emplace_back( segmentName( seg.id ) );
  for ( const char * col : kTlxColumns )
    header.emplace_back( col );
  return header;
}

void writeCsvRow( std::ostream & out, std::span<const std::string> fields )
{
  bool first = true;
  for ( const auto & f : fields )
  {
    if ( !first )
      out << ',';
    first = false;
    if ( f.find_first_of( ",\"\r\n" ) == std::string::npos )
    {
      out << f;
      continue;
    }
    out << '"';
    for ( char c : f )
    {
      if ( c == '"' )
        out << '"';
      out << c;
    }
    out << '"';
  }
  out << "\r\n";
}

namespace {

[[noreturn]] void fail( std::size_t line, const std::string & what )
{
  throw DataError( "parse", "line " + std::to_string( line ) + ": " + what );
}

std::string optionalCell( const std::optional<double> & v )
{
  return v ? formatNumber( *v ) : std::string();
}

}  // namespace

void exportReport( std::span<const ScoreReportRow> rows, std::ostream & out )
{
  if ( rows.empty() )
    throw Error( "empty_report", "report has no rows" );

  const auto header = reportHeader();
  writeCsvRow( out, header );
  for ( const auto & row : rows )
  {
    if ( !( row.meanError >= 0.0 && row.meanError <= std::numbers::pi ) )
      throw DataError( "schema", "mean error outside [0, pi] for participant " + row.participant );
    std::vector<std::string> fields{
      row.participant,
      std::string( conditionName( row.condition ) ),
      formatNumber( row.meanError ),
      std::to_string( row.framesScored ),
      std::to_string( row.framesUnscored ),
    };
    for ( const auto & v : row.perSegmentMeans )
      fields.push_back( optionalCell( v ) );
    for ( const auto & v : row.tlx )
      fields.push_back( optionalCell( v ) );
    writeCsvRow( out, fields );
  }
  if ( !out )
    throw Error( "io", "failed writing report" );
}

void exportReportFile( std::span<const ScoreReportRow> rows, const std::filesystem::path & path )
{
  std::ofstream out( path, std::ios::binary | std::ios::trunc );
  if ( !out )
    throw Error( "io", "cannot open " + path.string() + " for writing" );
  exportReport( rows, out );
}

std::size_t CsvTable::column( std::string_view name ) const
{
  for ( std::size_t i = 0; i < header.size(); ++i )
    if ( header[i] == name )
      return i;
  throw DataError( "schema", "missing column '" + std::string( name ) + "'" );
}

bool CsvTable::hasColumn( std::string_view name ) const
{
  for ( const auto & h : header )
    if ( h == name )
      return true;
  return false;
}

CsvTable readCsv( std::istream & in )
{
  const std::string text( ( std::istreambuf_iterator<char>( in ) ), std::istreambuf_iterator<char>() );

  CsvTable                  table;
  std::vector<std::string>  record;
  std::string               field;
  std::size_t               line        = 1;
  std::size_t               recordLine  = 1;
  bool                      inQuotes    = false;
  bool                      fieldQuoted = false;
  bool                      haveHeader  = false;


  const auto endRecord = [&] {
    record.push_back( std::move( field ) );
    field.clear();
    fieldQuoted = false;
    if ( record.size() == 1 && record[0].empty() )
    {
      record.clear();
      return;  // blank line
    }
    if ( !haveHeader )
    {
      table.header = std::move( record );
      haveHeader   = true;
    }
    else
    {
      if ( record.size() != table.header.size() )
        fail( recordLine, "expected " + std::to_string( table.header.size() ) + " fields, got "
                              + std::to_string( record.size() ) );
      table.rows.push_back( std::move( record ) );
    }
    record.clear();
  };

  for ( std::size_t i = 0; i < text.size(); ++i )
  {
    const char c = text[i];
    if ( inQuotes )
    {
      if ( c == '"' )
      {
        if ( i + 1 < text.size() && text[i + 1] == '"' )
        {
          field += '"';
          ++i;
        }
        else
          inQuotes = false;
      }
      else
      {
        if ( c == '\n' )
          ++line;
        field += c;
      }
      continue;
    }
    switch ( c )
    {
      case '"':
        if ( !field.empty() || fieldQuoted )
          fail( line, "unexpected quote" );
        inQuotes    = true;
        fieldQuoted = true;
        break;
      case ',':
        record.push_back( std::move( field ) );
        field.clear();
        fieldQuoted = false;
        break;
      case '\r':
        if ( i + 1 < text.size() && text[i + 1] == '\n' )
          break;
        fail( line, "bare carriage return" );
      case '\n':
        endRecord();
        ++line;
        recordLine = line;
        break;
      default:
        if ( fieldQuoted )
          fail( line, "text after closing quote" );
        field += c;
    }
  }
  if ( inQuotes )
    fail( recordLine, "unterminated quoted field" );
  if ( !field.empty() || fieldQuoted || !record.empty() )
    endRecord();
  if ( !haveHeader )
    throw DataError( "parse", "line 1: missing header" );
  return table;
}

CsvTable readCsvFile( const std::filesystem::path & path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw DataError( "io", "cannot open " + path.string() );
  try
  {
    return readCsv( in );
  }
  catch ( const DataError & e )
  {
    throw DataError( e.code(), path.string() + ": " + e.what() );
  }
}

}  // namespace posefollow
