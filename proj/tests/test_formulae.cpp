#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "sentilex/formulae.hpp"
#include "support.hpp"

using namespace sentilex;

namespace {

constexpr double kTol = 1e-9;

struct Expected {
  const char* name;
  double pos;
  double neg;
  int sign;
};

// Hand-derived values on cold#a.
const Expected kCold[] = {
    {"fs", 0.0, 0.75, 0},
    {"mean", 0.15, 0.375, 0},
    {"max", 0.625, 0.75, 0},
    {"median", 0.0, 0.375, 0},
    {"w1", 0.875 / 31.0, 18.75 / 31.0, 0},
    {"w2", 9.375 / 137.0, 73.125 / 137.0, 0},
    {"w1s", 11.0 / 31.0, 19.5 / 31.0, 0},
    {"w1n", 0.875 / 15.0, 0.65, 0},
    {"uni", 0.625, 0.625, -1},
    {"uniw", 0.625, 0.625, 0},
};

FormulaId id_of(const std::string& name) { return *formula_from_name(name); }

}  // namespace

// The oracle must agree with the hand derivations before it is trusted
// against the library.
TEST(Formulae, OracleAgreesWithHandDerivations) {
  const auto p = testdata::cold_a();
  for (const auto& e : kCold) {
    const auto o = oracle::formula(e.name, p.pos_scores, p.neg_scores);
    EXPECT_NEAR(o.pos, e.pos, kTol) << e.name;
    EXPECT_NEAR(o.neg, e.neg, kTol) << e.name;
    EXPECT_EQ(o.sign, e.sign) << e.name;
  }
  const auto w2 = oracle::formula("w2", p.pos_scores, p.neg_scores);
  EXPECT_NEAR(w2.pos, 0.068431, 5e-7);
  EXPECT_NEAR(w2.neg, 0.533759, 5e-7);
  const auto w1 = oracle::formula("w1", p.pos_scores, p.neg_scores);
  EXPECT_NEAR(w1.pos, 0.028226, 5e-7);
  EXPECT_NEAR(w1.neg, 0.604839, 5e-7);
}

TEST(Formulae, ColdMatchesDerivedValues) {
  const auto p = testdata::cold_a();
  for (const auto& e : kCold) {
    const auto out = apply_formula(id_of(e.name), p);
    EXPECT_NEAR(out.f_pos, e.pos, kTol) << e.name;
    EXPECT_NEAR(out.f_neg, e.neg, kTol) << e.name;
    EXPECT_EQ(out.forced_sign.value_or(0), e.sign) << e.name;
  }
}

TEST(Formulae, ColdMatchesOracleForEveryFormula) {
  const auto p = testdata::cold_a();
  for (FormulaId id : kAllFormulae) {
    const std::string name(formula_name(id));
    const auto o = oracle::formula(name, p.pos_scores, p.neg_scores);
    const auto out = apply_formula(id, p);
    EXPECT_NEAR(out.f_pos, o.pos, 1e-12) << name;
    EXPECT_NEAR(out.f_neg, o.neg, 1e-12) << name;
  }
}

TEST(Formulae, MappingExamples) {
  const auto p = testdata::cold_a();
  EXPECT_NEAR(map_polarity(apply_formula(FormulaId::fs, p), Strategy::m).value, -0.75, kTol);
  EXPECT_NEAR(map_polarity(apply_formula(FormulaId::mean, p), Strategy::d).value, -0.225, kTol);
  EXPECT_EQ(map_polarity({0.5, 0.5, std::nullopt}, Strategy::m).value, 0.5);
  const auto uni = apply_formula(FormulaId::uni, p);
  EXPECT_NEAR(map_polarity(uni, Strategy::m).value, -0.625, kTol);
  EXPECT_NEAR(map_polarity(uni, Strategy::d).value, -0.625, kTol);
  // uniw tie goes through the strategy's own rule.
  const auto uniw = apply_formula(FormulaId::uniw, p);
  EXPECT_NEAR(map_polarity(uniw, Strategy::m).value, 0.625, kTol);
  EXPECT_NEAR(map_polarity(uniw, Strategy::d).value, 0.0, kTol);
}

TEST(Formulae, NamesRoundTrip) {
  std::set<std::string> seen;
  for (FormulaId id : kAllFormulae) {
    const std::string n(formula_name(id));
    EXPECT_EQ(formula_from_name(n), id);
    seen.insert(n);
  }
  EXPECT_EQ(seen.size(), 14u);
  EXPECT_FALSE(formula_from_name("svm"));
}

TEST(Formulae, EmptyProfileIsRejected) {
  SenseProfile p;
  p.key = "x#n";
  EXPECT_THROW(apply_formula(FormulaId::fs, p), DataError);
}

TEST(Formulae, NullOnlyProfileGivesZeroForFilteredVariants) {
  const SenseProfile p{"z#n", {0, 0, 0}, {0, 0, 0}};
  for (auto id : {FormulaId::w1n, FormulaId::w2n, FormulaId::w1sn, FormulaId::w2sn}) {
    const auto out = apply_formula(id, p);
    EXPECT_EQ(out.f_pos, 0.0);
    EXPECT_EQ(out.f_neg, 0.0);
    EXPECT_FALSE(out.forced_sign);
  }
}

TEST(Formulae, MedianOfEvenCountAveragesMiddle) {
  const SenseProfile p{"m#n", {0.1, 0.4, 0.2, 0.3}, {0, 0, 0, 1}};
  const auto out = apply_formula(FormulaId::median, p);
  EXPECT_NEAR(out.f_pos, 0.25, 1e-12);
  EXPECT_NEAR(out.f_neg, 0.0, 1e-12);
}

TEST(Formulae, UniTieBreakFavoursLargerSet) {
  // Two strongly positive senses at 0.5, one strongly negative at 0.5.
  const SenseProfile p{"t#a", {0.5, 0.5, 0}, {0, 0, 0.5}};
  const auto uni = apply_formula(FormulaId::uni, p);
  ASSERT_TRUE(uni.forced_sign);
  EXPECT_EQ(*uni.forced_sign, 1);
  EXPECT_FALSE(apply_formula(FormulaId::uniw, p).forced_sign);
  // Equal set sizes leave the tie to the strategy.
  const SenseProfile q{"u#a", {0.5, 0}, {0, 0.5}};
  EXPECT_FALSE(apply_formula(FormulaId::uni, q).forced_sign);
}

TEST(Formulae, BaselineRndIsDeterministicAndCentred) {
  EXPECT_EQ(baseline_rnd("cold#a", 1).value, baseline_rnd("cold#a", 1).value);
  EXPECT_NE(baseline_rnd("cold#a", 1).value, baseline_rnd("cold#a", 2).value);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const double v = baseline_rnd("w" + std::to_string(i) + "#n", 17).value;
    ASSERT_GE(v, -1.0);
    ASSERT_LE(v, 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 10000.0, 0.0, 0.05);
}

TEST(Formulae, BaselineSwnrndPicksOneSense) {
  const SenseProfile single{"s#n", {0.25}, {0.0}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(baseline_swnrnd(single, seed).value, 0.25);
  }
  const auto p = testdata::cold_a();
  std::set<double> allowed;
  for (std::size_t i = 0; i < p.size(); ++i) {
    allowed.insert(p.pos_scores[i] >= p.neg_scores[i] ? p.pos_scores[i] : -p.neg_scores[i]);
  }
  std::set<double> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const double v = baseline_swnrnd(p, seed).value;
    EXPECT_TRUE(allowed.count(v)) << v;
    seen.insert(v);
  }
  EXPECT_EQ(seen, allowed);
  const SenseProfile zero{"z#n", {0, 0}, {0, 0}};
  EXPECT_EQ(baseline_swnrnd(zero, 4).value, 0.0);
}

TEST(Formulae, MajorityClass) {
  EXPECT_EQ(majority_class_label(std::vector<int>{-1, -1, 1}), -1);
  EXPECT_EQ(majority_class_label(std::vector<int>{1, 1, -1, -1}), 1);
  std::vector<int> gi(2291, -1);
  gi.insert(gi.end(), 1915, 1);
  EXPECT_EQ(majority_class_label(gi), -1);
  EXPECT_THROW(majority_class_label(std::vector<int>{}), DataError);
}

TEST(Formulae, FeatureVectorLayout) {
  const auto& names = feature_names();
  ASSERT_EQ(names.size(), 27u);
  EXPECT_EQ(names[0], "fs_m");
  EXPECT_EQ(names[1], "fs_d");
  EXPECT_EQ(names[4], "uni");
  EXPECT_EQ(names[26], "max_d");
  const auto v = all_formula_features(testdata::cold_a());
  EXPECT_NEAR(v[*feature_index("fs_m")], -0.75, kTol);
  EXPECT_NEAR(v[*feature_index("mean_d")], -0.225, kTol);
  EXPECT_NEAR(v[*feature_index("uni")], -0.625, kTol);
  const auto z = all_formula_features(SenseProfile{"z#n", {0, 0}, {0, 0}});
  for (double x : z) EXPECT_EQ(x, 0.0);
}

TEST(Formulae, FeaturesMatchOracleMapping) {
  Rng rng(99);
  for (int t = 0; t < 200; ++t) {
    const auto p = testdata::random_profile(rng);
    const auto v = all_formula_features(p);
    std::size_t i = 0;
    for (FormulaId id : kAllFormulae) {
      const auto o = oracle::formula(std::string(formula_name(id)), p.pos_scores, p.neg_scores);
      EXPECT_NEAR(v[i++], oracle::map_m(o), 1e-12);
      if (id != FormulaId::uni) {
        EXPECT_NEAR(v[i++], oracle::map_d(o), 1e-12);
      }
    }
  }
}
