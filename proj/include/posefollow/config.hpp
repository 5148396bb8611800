// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "posefollow/metric.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace posefollow {

/// Visual-feedback condition shown to the user:
///   C1 trainer video + user video,
///   C2 trainer video + user video with skeleton,
///   C3 trainer video + user skeleton,
///   C4 trainer video with skeleton + user skeleton.
enum class Condition : std::uint8_t
{
  C1 = 1,
  C2,
  C3,
  C4,
};

std::string_view         conditionName( Condition c ) noexcept;
std::optional<Condition> conditionFromName( std::string_view name ) noexcept;

struct SessionConfig
{
  Condition    condition = Condition::C1;
  MetricConfig metric;
  /// Max distance in seconds between the playback position and the aligned trainer frame.
  double alignTolerance = 0.1;
  /// EMA weight of the newest user pose; 1.0 disables smoothing.
  double smoothingAlpha = 1.0;
  bool   showErrorLive  = false;

  /// Throws DataError("invalid_config").
  void validate() const;

  friend bool operator==( const SessionConfig &, const SessionConfig & ) = default;
};

}  // namespace posefollow
