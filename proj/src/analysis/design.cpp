// SPDX-License-Identifier: Apache-2.0
#include "posefollow/analysis.hpp"
#include "posefollow/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>

namespace posefollow::analysis {

std::vector<std::vector<int>> latinSquare( int k, int replicates )
{
  if ( k < 2 )
    throw Error( "invalid_argument", "latin square needs k >= 2" );
  if ( replicates < 1 )
    throw Error( "invalid_argument", "latin square needs replicates >= 1" );

  // Even k: Williams design, first row 0, 1, k-1, 2, k-2, ...
  std::vector<int> first( static_cast<std::size_t>( k ) );
  if ( k % 2 == 0 )
  {
    int lo = 1;
    int hi = k - 1;
    first[0] = 0;
    for ( int pos = 1; pos < k; ++pos )
      first[static_cast<std::size_t>( pos )] = pos % 2 == 1 ? lo++ : hi--;
  }
  else
    std::iota( first.begin(), first.end(), 0 );

  std::vector<std::vector<int>> rows;
  rows.reserve( static_cast<std::size_t>( k * replicates ) );
  for ( int rep = 0; rep < replicates; ++rep )
    for ( int i = 0; i < k; ++i )
    {
      std::vector<int> row( first.size() );
      std::transform( first.begin(), first.end(), row.begin(), [&]( int c ) { return ( c + i ) % k; } );
      rows.push_back( std::move( row ) );
    }
  return rows;
}

double tlxOverall( const TlxResponse & response )
{
  if ( !( std::isfinite( response.scaleMax ) && response.scaleMax > 0.0 ) )
    throw DataError( "out_of_range", "TLX scale_max must be positive" );
  double sum = 0.0;
  for ( double v : response.subscales )
  {
    if ( !( v >= 0.0 && v <= response.scaleMax ) )
      throw DataError( "out_of_range", "TLX subscale outside [0, scale_max]" );
    sum += v;
  }
  return sum / static_cast<double>( kTlxSubscaleCount ) * 100.0 / response.scaleMax;
}

RankSumResult rankSum( const std::vector<std::vector<int>> & rankings )
{
  if ( rankings.empty() )
    throw DataError( "not_permutation", "no rankings given" );
  const std::size_t k = rankings.front().size();
  RankSumResult     out;
  out.totals.assign( k, 0 );
  for ( std::size_t r = 0; r < rankings.size(); ++r )
  {
    const auto & row = rankings[r];
    std::vector<bool> seen( k + 1, false );
    if ( row.size() != k )
      throw DataError( "not_permutation", "ranking row " + std::to_string( r + 1 ) + " has the wrong length" );
    for ( int v : row )
    {
      if ( v < 1 || static_cast<std::size_t>( v ) > k || seen[static_cast<std::size_t>( v )] )
        throw DataError( "not_permutation",
                         "ranking row " + std::to_string( r + 1 ) + " is not a permutation of 1.." + std::to_string( k ) );
      seen[static_cast<std::size_t>( v )] = true;
    }
    for ( std::size_t c = 0; c < k; ++c )
      out.totals[c] += row[c];
  }
  out.ordering.resize( k );
  std::iota( out.ordering.begin(), out.ordering.end(), 0 );
  std::stable_sort( out.ordering.begin(), out.ordering.end(),
                    [&]( int a, int b ) { return out.totals[static_cast<std::size_t>( a )] < out.totals[static_cast<std::size_t>( b )]; } );
  return out;
}

namespace {

std::string lineRef( std::size_t row )
{
  // Header is line 1.
  return "line " + std::to_string( row + 2 ) + ": ";
}

double parseNumber( const std::string & cell, std::size_t row, std::string_view column )
{
  double      v     = 0.0;
  const char *begin = cell.data();
  const char *end   = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars( begin, end, v );
  if ( cell.empty() || ec != std::errc() || ptr != end || !std::isfinite( v ) )
    throw DataError( "parse", lineRef( row ) + "column '" + std::string( column ) + "' is not a number: '" + cell + "'" );
  return v;
}

std::optional<double> rowTlx( const CsvTable & csv, std::size_t row, double scaleMax, bool required )
{
  TlxResponse resp;
  resp.scaleMax = scaleMax;
  for ( std::size_t s = 0; s < kTlxSubscaleCount; ++s )
  {
    const auto & cell = csv.rows[row][csv.column( kTlxColumns[s] )];
    if ( cell.empty() )
    {
      if ( required )
        throw DataError( "schema", lineRef( row ) + "missing " + kTlxColumns[s] );
      return std::nullopt;
    }
    resp.subscales[s] = parseNumber( cell, row, kTlxColumns[s] );
  }
  try
  {
    return tlxOverall( resp );
  }
  catch ( const DataError & e )
  {
    throw DataError( e.code(), lineRef( row ) + e.what() );
  }
}

}  // namespace

StudyTable tableFromCsv( const CsvTable & csv, std::string_view measure, double tlxScaleMax )
{
  const std::size_t pCol    = csv.column( "participant" );
  const std::size_t cCol    = csv.column( "condition" );
  const bool        derived = measure == "tlx_overall" && !csv.hasColumn( measure );
  const std::size_t mCol    = derived ? 0 : csv.column( measure );

  std::vector<std::string>                           participants;
  std::map<std::string, std::size_t>                 participantIndex;
  std::map<std::string, std::map<std::string, double>> cells;
  std::map<std::string, int>                         conditionSeen;

  for ( std::size_t r = 0; r < csv.rows.size(); ++r )
  {
    const auto & row = csv.rows[r];
    const auto & p   = row[pCol];
    const auto & c   = row[cCol];
    if ( p.empty() || c.empty() )
      throw DataError( "schema", lineRef( r ) + "participant and condition are required" );
    const double v = derived ? *rowTlx( csv, r, tlxScaleMax, true ) : parseNumber( row[mCol], r, measure );
    if ( participantIndex.emplace( p, participants.size() ).second )
      participants.push_back( p );
    if ( !cells[p].emplace( c, v ).second )
      throw DataError( "schema", lineRef( r ) + "duplicate cell for participant " + p + ", condition " + c );
    conditionSeen[c] += 1;
  }

  std::vector<std::string> conditions;
  for ( const auto & [c, count] : conditionSeen )
    conditions.push_back( c );

  std::vector<std::vector<double>> values;
  for ( const auto & p : participants )
  {
    std::vector<double> row;
    for ( const auto & c : conditions )
    {
      const auto it = cells[p].find( c );
      if ( it == cells[p].end() )
        throw DataError( "schema", "missing cell for participant " + p + ", condition " + c );
      row.push_back( it->second );
    }
    values.push_back( std::move( row ) );
  }
  return StudyTable( std::move( participants ), std::move( conditions ), std::move( values ) );
}

std::vector<ConditionScore> tlxByCondition( const CsvTable & csv, double scaleMax )
{
  const std::size_t cCol = csv.column( "condition" );
  std::map<std::string, std::pair<double, int>> acc;
  for ( std::size_t r = 0; r < csv.rows.size(); ++r )
  {
    const auto score = rowTlx( csv, r, scaleMax, false );
    if ( !score )
      continue;
    auto & [sum, count] = acc[csv.rows[r][cCol]];
    sum += *score;
    ++count;
  }
  if ( acc.empty() )
    throw DataError( "schema", "no rows with complete TLX responses" );
  std::vector<ConditionScore> out;
  for ( const auto & [c, sc] : acc )
    out.push_back( { c, sc.first / sc.second, sc.second } );
  return out;
}

RankInput rankingsFromCsv( const CsvTable & csv )
{
  const std::size_t pCol = csv.column( "participant" );
  const std::size_t cCol = csv.column( "condition" );
  const std::size_t rCol = csv.column( "rank" );

  std::vector<std::string>                          participants;
  std::map<std::string, std::map<std::string, int>> cells;
  std::map<std::string, int>                        conditionSeen;
  for ( std::size_t r = 0; r < csv.rows.size(); ++r )
  {
    const auto & row  = csv.rows[r];
    const double rank = parseNumber( row[rCol], r, "rank" );
    if ( rank != std::floor( rank ) )
      throw DataError( "parse", lineRef( r ) + "rank must be an integer" );
    if ( !cells.contains( row[pCol] ) )
      participants.push_back( row[pCol] );
    if ( !cells[row[pCol]].emplace( row[cCol], static_cast<int>( rank ) ).second )
      throw DataError( "schema", lineRef( r ) + "duplicate rank for participant " + row[pCol] );
    conditionSeen[row[cCol]] += 1;
  }
  RankInput in;
  for ( const auto & [c, n] : conditionSeen )
    in.conditions.push_back( c );
  for ( const auto & p : participants )
  {
    std::vector<int> ranks;
    for ( const auto & c : in.conditions )
    {
      const auto it = cells[p].find( c );
      if ( it == cells[p].end() )
        throw DataError( "schema", "participant " + p + " did not rank condition " + c );
      ranks.push_back( it->second );
    }
    in.rankings.push_back( std::move( ranks ) );
  }
  if ( in.rankings.empty() )
    throw DataError( "schema", "no rankings in input" );
  return in;
}

}  // namespace posefollow::analysis
