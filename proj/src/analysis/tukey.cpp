// SPDX-License-Identifier: Apache-2.0
#include "posefollow/analysis.hpp"
#include "posefollow/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace posefollow::analysis {

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

struct QRow
{
  int                   df;
  std::array<double, 9> q;  // k = 2..10
};

// Upper 5% points of the studentized range distribution, 4 decimals.
// Regenerate with scripts/gen_qcrit_table.py.
constexpr QRow kTable[] = {
  {5, {3.6354, 4.6017, 5.2183, 5.6731, 6.0329, 6.3299, 6.5823, 6.8014, 6.9947}},
  {6, {3.4605, 4.3392, 4.8956, 5.3049, 5.6284, 5.8953, 6.1222, 6.3192, 6.4931}},
  {7, {3.3441, 4.1649, 4.6813, 5.0601, 5.3591, 5.6057, 5.8153, 5.9973, 6.1579}},
  {8, {3.2612, 4.0410, 4.5288, 4.8858, 5.1672, 5.3991, 5.5962, 5.7673, 5.9183}},
  {9, {3.1992, 3.9485, 4.4149, 4.7554, 5.0235, 5.2444, 5.4319, 5.5947, 5.7384}},
  {10, {3.1511, 3.8768, 4.3266, 4.6543, 4.9120, 5.1242, 5.3042, 5.4605, 5.5984}},
  {11, {3.1127, 3.8196, 4.2561, 4.5736, 4.8230, 5.0281, 5.2021, 5.3531, 5.4863}},
  {12, {3.0813, 3.7729, 4.1987, 4.5077, 4.7502, 4.9496, 5.1187, 5.2653, 5.3946}},
  {13, {3.0552, 3.7341, 4.1509, 4.4529, 4.6897, 4.8842, 5.0491, 5.1921, 5.3181}},
  {14, {3.0332, 3.7014, 4.1105, 4.4066, 4.6385, 4.8290, 4.9903, 5.1301, 5.2534}},
  {15, {3.0143, 3.6734, 4.0760, 4.3670, 4.5947, 4.7816, 4.9399, 5.0770, 5.1979}},
  {16, {2.9980, 3.6491, 4.0461, 4.3327, 4.5568, 4.7406, 4.8962, 5.0310, 5.1498}},
  {17, {2.9837, 3.6280, 4.0200, 4.3027, 4.5237, 4.7048, 4.8580, 4.9907, 5.1077}},
  {18, {2.9712, 3.6093, 3.9970, 4.2763, 4.4944, 4.6731, 4.8243, 4.9552, 5.0705}},
  {19, {2.9600, 3.5927, 3.9766, 4.2528, 4.4685, 4.6450, 4.7944, 4.9236, 5.0375}},
  {20, {2.9500, 3.5779, 3.9583, 4.2319, 4.4452, 4.6199, 4.7676, 4.8954, 5.0079}},
  {21, {2.9410, 3.5646, 3.9419, 4.2130, 4.4244, 4.5973, 4.7435, 4.8699, 4.9813}},
  {22, {2.9329, 3.5526, 3.9270, 4.1959, 4.4055, 4.5769, 4.7217, 4.8469, 4.9572}},
  {23, {2.9255, 3.5417, 3.9136, 4.1805, 4.3883, 4.5583, 4.7018, 4.8260, 4.9353}},
  {24, {2.9188, 3.5317, 3.9013, 4.1663, 4.3727, 4.5413, 4.6838, 4.8069, 4.9152}},
  {25, {2.9126, 3.5226, 3.8900, 4.1534, 4.3583, 4.5258, 4.6672, 4.7894, 4.8969}},
  {26, {2.9070, 3.5142, 3.8796, 4.1415, 4.3451, 4.5115, 4.6519, 4.7733, 4.8800}},
  {27, {2.9017, 3.5064, 3.8701, 4.1305, 4.3329, 4.4983, 4.6378, 4.7584, 4.8644}},
  {28, {2.8969, 3.4993, 3.8612, 4.1203, 4.3217, 4.4861, 4.6248, 4.7446, 4.8500}},
  {29, {2.8924, 3.4926, 3.8530, 4.1109, 4.3112, 4.4747, 4.6127, 4.7318, 4.8366}},
  {30, {2.8882, 3.4864, 3.8454, 4.1021, 4.3015, 4.4642, 4.6014, 4.7199, 4.8241}},
  {31, {2.8843, 3.4806, 3.8383, 4.0939, 4.2924, 4.4543, 4.5909, 4.7088, 4.8125}},
  {32, {2.8807, 3.4752, 3.8316, 4.0862, 4.2839, 4.4451, 4.5811, 4.6984, 4.8016}},
  {33, {2.8772, 3.4702, 3.8254, 4.0790, 4.2759, 4.4365, 4.5718, 4.6887, 4.7914}},
  {34, {2.8740, 3.4654, 3.8195, 4.0723, 4.2684, 4.4284, 4.5632, 4.6795, 4.7818}},
  {35, {2.8710, 3.4610, 3.8140, 4.0659, 4.2614, 4.4207, 4.5550, 4.6709, 4.7727}},
  {36, {2.8682, 3.4568, 3.8088, 4.0600, 4.2548, 4.4135, 4.5473, 4.6628, 4.7642}},
  {37, {2.8655, 3.4528, 3.8039, 4.0543, 4.2485, 4.4068, 4.5401, 4.6551, 4.7562}},
  {38, {2.8629, 3.4490, 3.7992, 4.0490, 4.2426, 4.4003, 4.5332, 4.6479, 4.7486}},
  {39, {2.8605, 3.4455, 3.7949, 4.0439, 4.2370, 4.3942, 4.5267, 4.6410, 4.7414}},
  {40, {2.8582, 3.4421, 3.7907, 4.0391, 4.2316, 4.3885, 4.5205, 4.6345, 4.7345}},
  {48, {2.8435, 3.4203, 3.7637, 4.0081, 4.1972, 4.3511, 4.4806, 4.5923, 4.6902}},
  {60, {2.8288, 3.3987, 3.7371, 3.9774, 4.1632, 4.3141, 4.4411, 4.5504, 4.6463}},
  {80, {2.8144, 3.3773, 3.7107, 3.9470, 4.1294, 4.2775, 4.4019, 4.5089, 4.6028}},
  {120, {2.8000, 3.3561, 3.6846, 3.9169, 4.0960, 4.2412, 4.3630, 4.4678, 4.5595}},
  {kInf, {2.7718, 3.3145, 3.6332, 3.8577, 4.0301, 4.1696, 4.2863, 4.3865, 4.4741}},
};

}  // namespace

double qCritical05( int k, int df )
{
  if ( k < 2 || k > 10 )
    throw Error( "unsupported", "q critical table covers k = 2..10, got " + std::to_string( k ) );
  if ( df < kTable[0].df )
    throw Error( "unsupported", "q critical table covers df >= 5, got " + std::to_string( df ) );
  const QRow * row = &kTable[0];
  for ( const auto & r : kTable )
  {
    if ( r.df > df )
      break;
    row = &r;
  }
  return row->q[static_cast<std::size_t>( k - 2 )];
}

TukeyResult tukeyHsd( const StudyTable & table, const AnovaResult & anova, double alpha )
{
  if ( alpha != 0.05 )
    throw Error( "unsupported_alpha", "unsupported alpha (only 0.05 is tabulated)" );
  const std::size_t k = table.conditionCount();
  if ( anova.conditionMeans.size() != k )
    throw Error( "invalid_argument", "ANOVA result does not match the table" );

  TukeyResult out;
  out.qCritical   = qCritical05( static_cast<int>( k ), anova.dfError );
  const double se = std::sqrt( anova.msError / static_cast<double>( table.participantCount() ) );
  for ( std::size_t i = 0; i < k; ++i )
    for ( std::size_t j = i + 1; j < k; ++j )
    {
      const double diff = anova.conditionMeans[i] - anova.conditionMeans[j];
      const double q    = std::abs( diff ) / se;
      out.pairs.push_back( { i, j, diff, q, q >= out.qCritical } );
    }
  return out;
}

}  // namespace posefollow::analysis
