// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "posefollow/config.hpp"
#include "posefollow/pose.hpp"
#include "posefollow/session.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace posefollow {

inline constexpr std::size_t kTlxSubscaleCount = 6;

/// mental, physical, temporal, performance, effort, frustration
inline constexpr std::array<const char *, kTlxSubscaleCount> kTlxColumns{
  "tlx_mental", "tlx_physical", "tlx_temporal", "tlx_performance", "tlx_effort", "tlx_frustration",
};

struct ScoreReportRow
{
  std::string                                      participant;
  Condition                                        condition = Condition::C1;
  double                                           meanError = 0.0;
  int                                              framesScored   = 0;
  int                                              framesUnscored = 0;
  std::array<std::optional<double>, kSegmentCount> perSegmentMeans{};
  std::array<std::optional<double>, kTlxSubscaleCount> tlx{};

  friend bool operator==( const ScoreReportRow &, const ScoreReportRow & ) = default;
};

ScoreReportRow reportRow( std::string participant, Condition condition, const TrialSummary & summary );

/// Fixed header: participant,condition,mean_error_rad,frames_scored,frames_unscored,
/// <segment names in table order>,<tlx columns>.
std::vector<std::string> reportHeader();

/// Throws Error("empty_report") for no rows, DataError("schema") for an error outside [0, pi].
void exportReport( std::span<const ScoreReportRow> rows, std::ostream & out );
void exportReportFile( std::span<const ScoreReportRow> rows, const std::filesystem::path & path );

/// Shortest decimal that parses back to the same double.
std::string formatNumber( double value );

/// RFC-4180 CSV: header row plus data rows, every row the header's width.
struct CsvTable
{
  std::vector<std::string>              header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name. Throws DataError("schema") if absent.
  std::size_t column( std::string_view name ) const;
  bool        hasColumn( std::string_view name ) const;
};

/// Throws DataError("parse") with a 1-based line number.
CsvTable readCsv( std::istream & in );
CsvTable readCsvFile( const std::filesystem::path & path );

void writeCsvRow( std::ostream & out, std::span<const std::string> fields );

}  // namespace posefollow
