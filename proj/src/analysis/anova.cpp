// SPDX-License-Identifier: Apache-2.0
#include "posefollow/analysis.hpp"
#include "posefollow/error.hpp"

#include <cmath>
#include <limits>

namespace posefollow::analysis {

StudyTable::StudyTable( std::vector<std::string> participants, std::vector<std::string> conditions,
                        std::vector<std::vector<double>> values )
  : participants_( std::move( participants ) ), conditions_( std::move( conditions ) ), values_( std::move( values ) )
{
  if ( participants_.size() < 2 )
    throw DataError( "schema", "study table needs at least 2 participants" );
  if ( conditions_.size() < 2 )
    throw DataError( "schema", "study table needs at least 2 conditions" );
  if ( values_.size() != participants_.size() )
    throw DataError( "schema", "study table row count does not match participants" );
  for ( std::size_t i = 0; i < values_.size(); ++i )
  {
    if ( values_[i].size() != conditions_.size() )
      throw DataError( "schema", "study table row " + std::to_string( i ) + " is incomplete" );
    for ( double v : values_[i] )
      if ( !std::isfinite( v ) )
        throw DataError( "schema", "study table row " + std::to_string( i ) + " has a non-finite value" );
  }
}

namespace {

// Continued fraction for I_x(a,b), modified Lentz. Converges fast for x < (a+1)/(a+b+2).
double betaContinuedFraction( double a, double b, double x )
{
  constexpr int    kMaxIter = 10000;
  constexpr double kEps     = 1e-15;
  constexpr double kTiny    = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double       c   = 1.0;
  double       d   = 1.0 - qab * x / qap;
  if ( std::abs( d ) < kTiny )
    d = kTiny;
  d        = 1.0 / d;
  double h = d;
  for ( int m = 1; m <= kMaxIter; ++m )
  {
    const double m2 = 2.0 * m;
    double       aa = m * ( b - m ) * x / ( ( qam + m2 ) * ( a + m2 ) );
    d               = 1.0 + aa * d;
    if ( std::abs( d ) < kTiny )
      d = kTiny;
    c = 1.0 + aa / c;
    if ( std::abs( c ) < kTiny )
      c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -( a + m ) * ( qab + m ) * x / ( ( a + m2 ) * ( qap + m2 ) );
    d  = 1.0 + aa * d;
    if ( std::abs( d ) < kTiny )
      d = kTiny;
    c = 1.0 + aa / c;
    if ( std::abs( c ) < kTiny )
      c = kTiny;
    d                = 1.0 / d;
    const double del = d * c;
    h *= del;
    if ( std::abs( del - 1.0 ) < kEps )
      return h;
  }
  throw Error( "numeric", "incomplete beta continued fraction did not converge" );
}

}  // namespace

double regularizedIncompleteBeta( double a, double b, double x )
{
  if ( !( a > 0.0 && b > 0.0 ) || !( x >= 0.0 && x <= 1.0 ) )
    throw Error( "invalid_argument", "incomplete beta needs a, b > 0 and x in [0,1]" );
  if ( x == 0.0 || x == 1.0 )
    return x;
  const double logFront =
    std::lgamma( a + b ) - std::lgamma( a ) - std::lgamma( b ) + a * std::log( x ) + b * std::log1p( -x );
  const double front = std::exp( logFront );
  if ( x < ( a + 1.0 ) / ( a + b + 2.0 ) )
    return front * betaContinuedFraction( a, b, x ) / a;
  return 1.0 - front * betaContinuedFraction( b, a, 1.0 - x ) / b;
}

double fSurvival( double f, double d1, double d2 )
{
  if ( !( f > 0.0 ) )
    return 1.0;
  if ( std::isinf( f ) )
    return 0.0;
  return regularizedIncompleteBeta( d2 / 2.0, d1 / 2.0, d2 / ( d2 + d1 * f ) );
}

AnovaResult rmAnova( const StudyTable & table )
{
  const std::size_t n = table.participantCount();
  const std::size_t k = table.conditionCount();

  std::vector<double> subjectMeans( n, 0.0 );
  std::vector<double> conditionMeans( k, 0.0 );
  double              grand = 0.0;
  for ( std::size_t i = 0; i < n; ++i )
    for ( std::size_t j = 0; j < k; ++j )
    {
      const double x = table.at( i, j );
      subjectMeans[i] += x;
      conditionMeans[j] += x;
      grand += x;
    }
  for ( auto & m : subjectMeans )
    m /= static_cast<double>( k );
  for ( auto & m : conditionMeans )
    m /= static_cast<double>( n );
  grand /= static_cast<double>( n * k );

  double ssTotal = 0.0;
  double ssError = 0.0;
  for ( std::size_t i = 0; i < n; ++i )
    for ( std::size_t j = 0; j < k; ++j )
    {
      const double x = table.at( i, j );
      ssTotal += ( x - grand ) * ( x - grand );
      // Residual after removing subject and condition effects; equals
      // SS_total - SS_subj - SS_cond without the cancellation.
      const double r = x - subjectMeans[i] - conditionMeans[j] + grand;
      ssError += r * r;
    }
  double ssSubjects = 0.0;
  for ( double m : subjectMeans )
    ssSubjects += ( m - grand ) * ( m - grand );
  ssSubjects *= static_cast<double>( k );
  double ssConditions = 0.0;
  for ( double m : conditionMeans )
    ssConditions += ( m - grand ) * ( m - grand );
  ssConditions *= static_cast<double>( n );

  if ( ssTotal == 0.0 || ssError <= 1e-13 * ssTotal )
    throw Error( "degenerate", "degenerate (zero error variance)" );

  AnovaResult r;
  r.dfBetween      = static_cast<int>( k - 1 );
  r.dfError        = static_cast<int>( ( k - 1 ) * ( n - 1 ) );
  r.ssConditions   = ssConditions;
  r.ssSubjects     = ssSubjects;
  r.ssError        = ssError;
  r.msError        = ssError / r.dfError;
  r.F              = ( ssConditions / r.dfBetween ) / r.msError;
  r.p              = fSurvival( r.F, r.dfBetween, r.dfError );
  r.conditionMeans = std::move( conditionMeans );
  r.grandMean      = grand;
  return r;
}

}  // namespace posefollow::analysis
