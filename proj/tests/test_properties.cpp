#include <gtest/gtest.h>

#include "properties.hpp"

namespace {

constexpr int kCases = 1000;

}  // namespace

TEST(Properties, SignConsistency) { EXPECT_EQ(props::sign_consistency(1, kCases), 0u); }
TEST(Properties, MDominatesD) { EXPECT_EQ(props::m_dominates_d(2, kCases), 0u); }
TEST(Properties, ScalingLinearity) { EXPECT_EQ(props::scaling_linearity(3, kCases), 0u); }
TEST(Properties, NullFilterComposition) { EXPECT_EQ(props::null_filter_composition(4, kCases), 0u); }
TEST(Properties, SingleSenseCollapse) { EXPECT_EQ(props::single_sense_collapse(5, kCases), 0u); }
TEST(Properties, MetricBounds) { EXPECT_EQ(props::metric_bounds(6, kCases), 0u); }
TEST(Properties, PermutationEquivariance) { EXPECT_EQ(props::permutation_equivariance(7, kCases), 0u); }
TEST(Properties, FeatureRowsFollowKeys) { EXPECT_EQ(props::feature_rows_follow_keys(8, 50), 0u); }
TEST(Properties, SeedDeterminism) { EXPECT_EQ(props::seed_determinism(9, kCases), 0u); }
TEST(Properties, OracleEquivalence) { EXPECT_EQ(props::oracle_equivalence(10, kCases), 0u); }
