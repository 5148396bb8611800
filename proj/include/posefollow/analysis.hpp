// SPDX-License-Identifier: Apache-2.0
#pragma once

// Within-subject study analysis: counterbalancing, repeated-measures ANOVA,
// Tukey HSD, NASA-TLX and rank-sum preference scoring.

#include "posefollow/report.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace posefollow::analysis {

/// n participants x k conditions, complete. Row-major.
class StudyTable
{
public:
  /// Throws DataError("schema") on n < 2, k < 2, a ragged matrix or non-finite values.
  StudyTable( std::vector<std::string> participants, std::vector<std::string> conditions,
              std::vector<std::vector<double>> values );

  std::size_t participantCount() const noexcept { return participants_.size(); }
  std::size_t conditionCount() const noexcept { return conditions_.size(); }
  double      at( std::size_t participant, std::size_t condition ) const
  {
    return values_[participant][condition];
  }
  const std::vector<std::string> &         participants() const noexcept { return participants_; }
  const std::vector<std::string> &         conditions() const noexcept { return conditions_; }
  const std::vector<std::vector<double>> & values() const noexcept { return values_; }

private:
  std::vector<std::string>         participants_;
  std::vector<std::string>         conditions_;
  std::vector<std::vector<double>> values_;
};

/// Rows of condition indices (0-based). The first k rows are a balanced (Williams) square
/// for even k and a cyclic square for odd k; the remaining rows repeat it `replicates`
/// times. Throws Error("invalid_argument") for k < 2 or replicates < 1.
std::vector<std::vector<int>> latinSquare( int k, int replicates );

/// I_x(a, b), evaluated with a modified-Lentz continued fraction.
double regularizedIncompleteBeta( double a, double b, double x );

/// P(F' >= f) for F' ~ F(d1, d2).
double fSurvival( double f, double d1, double d2 );

struct AnovaResult
{
  double              F          = 0.0;
  int                 dfBetween  = 0;
  int                 dfError    = 0;
  double              p          = 1.0;
  std::vector<double> conditionMeans;
  double              grandMean  = 0.0;
  double              ssConditions = 0.0;
  double              ssSubjects   = 0.0;
  double              ssError      = 0.0;
  double              msError      = 0.0;
};

/// One-way repeated-measures ANOVA. Throws Error("degenerate") when the residual sum of
/// squares vanishes.
AnovaResult rmAnova( const StudyTable & table );

struct TukeyPair
{
  std::size_t i;
  std::size_t j;
  double      meanDiff;  // mean_i - mean_j
  double      q;
  bool        significantAt05;
};

struct TukeyResult
{
  double                 qCritical;
  std::vector<TukeyPair> pairs;
};

/// Critical studentized range value at alpha = .05 from the embedded table. For df between
/// rows, the next lower df row is used. Throws Error("unsupported") outside k in [2,10],
/// df >= 5.
double qCritical05( int k, int df );

/// Throws Error("unsupported_alpha") unless alpha == 0.05.
TukeyResult tukeyHsd( const StudyTable & table, const AnovaResult & anova, double alpha = 0.05 );

struct TlxResponse
{
  /// mental, physical, temporal, performance, effort, frustration
  std::array<double, kTlxSubscaleCount> subscales{};
  double                                scaleMax = 20.0;
};

/// Raw (unweighted) TLX on [0,100]. Throws DataError("out_of_range").
double tlxOverall( const TlxResponse & response );

struct RankSumResult
{
  std::vector<int> totals;
  /// Condition indices, best (lowest total) first; ties keep index order.
  std::vector<int> ordering;
};

/// Each row must be a permutation of 1..k. Throws DataError("not_permutation").
RankSumResult rankSum( const std::vector<std::vector<int>> & rankings );

// Loaders over CSV input.

/// Pivots long-form rows (participant, condition, <measure>) into a table. Participants
/// keep first-appearance order; conditions are sorted by label. Missing or duplicated
/// cells are data errors. The pseudo-measure "tlx_overall" derives the raw TLX score
/// from the six tlx_* columns.
StudyTable tableFromCsv( const CsvTable & csv, std::string_view measure, double tlxScaleMax = 20.0 );

struct ConditionScore
{
  std::string condition;
  double      mean;
  int         count;
};

/// Mean raw TLX per condition over every row with all six subscales filled.
std::vector<ConditionScore> tlxByCondition( const CsvTable & csv, double scaleMax );

struct RankInput
{
  std::vector<std::string>      conditions;
  std::vector<std::vector<int>> rankings;
};

/// Long-form participant,condition,rank rows pivoted to one ranking row per participant.
RankInput rankingsFromCsv( const CsvTable & csv );

}  // namespace posefollow::analysis
