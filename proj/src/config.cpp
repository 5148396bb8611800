// SPDX-License-Identifier: Apache-2.0
#include "posefollow/config.hpp"

#include "posefollow/error.hpp"

#include <cmath>

namespace posefollow {

std::string_view conditionName( Condition c ) noexcept
{
  switch ( c )
  {
    case Condition::C1: return "C1";
    case Condition::C2: return "C2";
    case Condition::C3: return "C3";
    case Condition::C4: return "C4";
  }
  return "?";
}

std::optional<Condition> conditionFromName( std::string_view name ) noexcept
{
  for ( auto c : { Condition::C1, Condition::C2, Condition::C3, Condition::C4 } )
    if ( conditionName( c ) == name )
      return c;
  return std::nullopt;
}

void SessionConfig::validate() const
{
  metric.validate();
  if ( !( std::isfinite( alignTolerance ) && alignTolerance > 0.0 ) )
    throw DataError( "invalid_config", "align_tolerance must be positive" );
  if ( !( smoothingAlpha > 0.0 && smoothingAlpha <= 1.0 ) )
    throw DataError( "invalid_config", "smoothing_alpha must lie in (0,1]" );
}

}  // namespace posefollow
