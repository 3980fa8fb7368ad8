#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "sentilex/evalkit.hpp"
#include "support.hpp"

using namespace sentilex;

using DV = std::vector<double>;
using IV = std::vector<int>;

TEST(Evalkit, SplitSizesAndDisjointness) {
  const auto plan = make_splits(10, 5, 0.7, 1);
  ASSERT_EQ(plan.splits.size(), 5u);
  for (const auto& s : plan.splits) {
    EXPECT_EQ(s.train.size(), 7u);
    EXPECT_EQ(s.test.size(), 3u);
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.test.begin(), s.test.end());
    EXPECT_EQ(all.size(), 10u);
  }
  EXPECT_EQ(make_splits(961).splits[0].train.size(), 673u);
  EXPECT_THROW(make_splits(9), DataError);
}

TEST(Evalkit, SplitsAreSeededAndDistinct) {
  const auto a = make_splits(100, 5, 0.7, 3);
  const auto b = make_splits(100, 5, 0.7, 3);
  for (std::size_t r = 0; r < 5; ++r) EXPECT_EQ(a.splits[r].train, b.splits[r].train);
  int collisions = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = make_splits(100, 5, 0.7, seed);
    std::set<std::vector<std::size_t>> distinct;
    for (const auto& s : p.splits) distinct.insert(s.train);
    collisions += distinct.size() != 5;
  }
  EXPECT_EQ(collisions, 0);
}

TEST(Evalkit, Mae) {
  EXPECT_DOUBLE_EQ(mae(DV{0.5, -0.5}, DV{0, 0}), 0.5);
  EXPECT_DOUBLE_EQ(mae(DV{0.3, 0.1}, DV{0.3, 0.1}), 0.0);
  EXPECT_DOUBLE_EQ(mae(DV{1, -1}, DV{-1, 1}), 2.0);
  EXPECT_THROW(mae(DV{1}, DV{1, 2}), DataError);
}

TEST(Evalkit, Pearson) {
  EXPECT_NEAR(pearson(DV{1, 2, 3, 4}, DV{2, 4, 6, 8}), 1.0, 1e-12);
  EXPECT_NEAR(pearson(DV{1, 2, 3}, DV{-1, -2, -3}), -1.0, 1e-12);
  EXPECT_NEAR(pearson(DV{1, 2, 3}, DV{1, 3, 2}), 0.5, 1e-12);
  EXPECT_THROW(pearson(DV{1, 1, 1}, DV{1, 2, 3}), DataError);
  EXPECT_TRUE(std::isnan(pearson_or_nan(DV{1, 1, 1}, DV{1, 2, 3})));
}

TEST(Evalkit, Accuracy) {
  EXPECT_EQ(accuracy(IV{1, -1}, IV{1, -1}), 1.0);
  EXPECT_EQ(accuracy(IV{1, -1}, IV{-1, 1}), 0.0);
  EXPECT_EQ(accuracy(IV{1, 1, 1, -1}, IV{1, 1, -1, -1}), 0.75);
}

TEST(Evalkit, Kappa) {
  EXPECT_NEAR(cohen_kappa(IV{1, -1, 1, -1}, IV{1, -1, 1, -1}), 1.0, 1e-12);
  EXPECT_NEAR(cohen_kappa(IV{-1, -1, -1, -1}, IV{1, -1, 1, -1}), 0.0, 1e-12);
  EXPECT_NEAR(cohen_kappa(IV{1, 1, -1, -1}, IV{1, -1, 1, -1}), 0.0, 1e-12);
  EXPECT_NEAR(cohen_kappa(IV{1, -1}, IV{-1, 1}), -1.0, 1e-12);
  bool degenerate = false;
  EXPECT_EQ(cohen_kappa(IV{1, 1, 1}, IV{1, 1, 1}, &degenerate), 0.0);
  EXPECT_TRUE(degenerate);
}

TEST(Evalkit, KappaTwoByTwoArithmetic) {
  // pred = [+,+,-,-], gold = [+,-,+,-]: every cell of the 2x2 table holds
  // one item, so po = pe = 0.5 and kappa is 0, not -1.
  const IV pred{1, 1, -1, -1}, gold{1, -1, 1, -1};
  const double po = 0.5, pe = 0.5 * 0.5 + 0.5 * 0.5;
  EXPECT_NEAR(cohen_kappa(pred, gold), (po - pe) / (1 - pe), 1e-12);
  EXPECT_NEAR(cohen_kappa(pred, gold), 0.0, 1e-12);
}

TEST(Evalkit, PairedTTest) {
  const DV a{0.5, 0.52, 0.49, 0.51, 0.5};
  EXPECT_EQ(paired_t_test(a, a).p_value, 1.0);
  const DV b{0.4, 0.41, 0.40, 0.41, 0.4};
  const auto r = paired_t_test(a, b);
  // d = [0.1, 0.11, 0.09, 0.1, 0.1]; sd = sqrt(0.0002 / 4).
  const double t = 0.1 / (std::sqrt(0.0002 / 4) / std::sqrt(5.0));
  EXPECT_NEAR(r.statistic, t, 1e-6);
  EXPECT_LT(r.p_value, 0.01);
  const auto rev = paired_t_test(b, a);
  EXPECT_NEAR(rev.p_value, r.p_value, 1e-15);
  EXPECT_NEAR(rev.statistic, -r.statistic, 1e-12);
  const auto flat = paired_t_test(DV{1, 2, 3}, DV{0, 1, 2});
  EXPECT_TRUE(flat.degenerate);
  EXPECT_EQ(flat.p_value, 0.0);
}

TEST(Evalkit, PairedTTestMatchesKnownQuantile) {
  // t = 2.776445 is the two-sided 5% critical value at 4 degrees of freedom.
  const double sd = 1.0, n = 5.0, mean = 2.776445105 * sd / std::sqrt(n);
  const double c = mean;
  DV a{c + 1, c - 1, c + 0.5, c - 0.5, c}, b(5, 0.0);
  // Rescale differences to have unit sample sd.
  double m = 0, ss = 0;
  for (double x : a) m += x;
  m /= 5;
  for (double x : a) ss += (x - m) * (x - m);
  const double s = std::sqrt(ss / 4);
  for (double& x : a) x = (x - m) / s + mean;
  EXPECT_NEAR(paired_t_test(a, b).p_value, 0.05, 1e-6);
}

TEST(Evalkit, RandomizationTest) {
  const RegressionMetric m = [](std::span<const double> p, std::span<const double> g) { return mae(p, g); };
  DV gold(50), good(50), bad(50);
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    gold[i] = rng.uniform(-1, 1);
    good[i] = gold[i];
    bad[i] = -gold[i];
  }
  EXPECT_EQ(approx_randomization_test(good, good, gold, m, 1000, 1).p_value, 1.0);
  const auto r = approx_randomization_test(good, bad, gold, m, 2000, 1);
  EXPECT_LT(r.p_value, 0.01);
  EXPECT_EQ(r.p_value, approx_randomization_test(good, bad, gold, m, 2000, 1).p_value);
  IV g{1, -1, 1, -1, 1, 1}, p{1, -1, 1, -1, 1, 1};
  EXPECT_EQ(approx_randomization_test(std::span<const int>(p), std::span<const int>(p),
                                      std::span<const int>(g), 500, 3)
                .p_value,
            1.0);
}

TEST(Evalkit, FisherZ) {
  EXPECT_NEAR(fisher_z_test(0.4, 50, 0.4, 80).p_value, 1.0, 1e-12);
  const auto r = fisher_z_test(0.9, 100, 0.1, 100);
  const double z = (std::atanh(0.9) - std::atanh(0.1)) / std::sqrt(2.0 / 97.0);
  EXPECT_NEAR(r.statistic, z, 1e-12);
  EXPECT_LT(r.p_value, 0.001);
  EXPECT_NEAR(fisher_z_test(0.1, 100, 0.9, 100).p_value, r.p_value, 1e-15);
  EXPECT_THROW(fisher_z_test(1.0, 10, 0.5, 10), DataError);
  EXPECT_THROW(fisher_z_test(0.5, 3, 0.5, 10), DataError);
  // z = 1.959964 gives p = 0.05.
  const double r1 = std::tanh(1.959963985 * std::sqrt(2.0 / 97.0));
  EXPECT_NEAR(fisher_z_test(r1, 100, 0.0, 100).p_value, 0.05, 1e-6);
}

TEST(Evalkit, MaeByBin) {
  const DV gold{-0.9, -0.1, 0.2, 0.95, 1.0}, pred{-0.5, 0.0, 0.2, 0.5, 0.0};
  const DV one{-1.0, 1.0};
  const auto single = mae_by_bin(pred, gold, one);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_NEAR(single[0].mae, mae(pred, gold), 1e-12);
  const auto eight = mae_by_bin(pred, gold, equal_bins());
  std::size_t total = 0;
  double weighted = 0;
  for (const auto& b : eight) {
    total += b.count;
    weighted += b.mae * static_cast<double>(b.count);
  }
  EXPECT_EQ(total, 5u);
  EXPECT_NEAR(weighted / 5.0, mae(pred, gold), 1e-12);
  const auto same = mae_by_bin(DV{0.3, 0.4}, DV{0.3, 0.31}, equal_bins());
  EXPECT_EQ(same.size(), 1u);
}

TEST(Evalkit, ExtremeBinsShowLargerErrorOnHeteroscedasticData) {
  Rng rng(5);
  DV gold, pred;
  for (int i = 0; i < 4000; ++i) {
    const double g = rng.uniform(-1, 1);
    gold.push_back(g);
    pred.push_back(g + rng.normal() * 0.4 * std::abs(g));
  }
  const auto bins = mae_by_bin(pred, gold, equal_bins());
  ASSERT_EQ(bins.size(), 8u);
  EXPECT_GT(bins.front().mae, bins[3].mae);
  EXPECT_GT(bins.back().mae, bins[4].mae);
}

TEST(Evalkit, RegressionOutliers) {
  DV gold(100, 0.0), pred(100, 0.0);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) pred[i] = rng.uniform(-0.05, 0.05);
  pred[17] = 0.9;
  const auto out = regression_outliers(pred, gold);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], 17u);
}

TEST(Evalkit, ClassificationErrorPartition) {
  const IV gold{1, 1, -1, -1}, a{-1, 1, 1, -1}, b{-1, 1, 1, -1};
  const auto same = classification_errors(a, b, gold);
  EXPECT_EQ(same.both_wrong.size(), 2u);
  EXPECT_TRUE(same.only_a_wrong.empty());
  EXPECT_TRUE(same.only_b_wrong.empty());
  const auto perfect = classification_errors(gold, b, gold);
  EXPECT_TRUE(perfect.only_a_wrong.empty());
  EXPECT_EQ(perfect.only_b_wrong.size(), 2u);
  EXPECT_EQ(perfect.share(perfect.only_b_wrong), 1.0);
}

TEST(Evalkit, SummarizeAndReport) {
  const auto s = summarize({0.1, 0.2, 0.3});
  EXPECT_NEAR(s.mean, 0.2, 1e-12);
  EXPECT_NEAR(s.std, 0.1, 1e-12);
  EXPECT_NEAR(summarize({0.1, NAN, 0.3}).mean, 0.2, 1e-12);
  EvalReport rep;
  rep.metric_names = {"MAE"};
  rep.add("fs_m", {{"MAE", s}});
  std::ostringstream tsv, txt;
  write_report_tsv(tsv, rep);
  write_report_table(txt, rep);
  EXPECT_EQ(tsv.str(), "system\tMAE_mean\tMAE_std\nfs_m\t0.200000\t0.100000\n");
  EXPECT_NE(txt.str().find("0.200"), std::string::npos);
}
