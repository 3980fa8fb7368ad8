#include <gtest/gtest.h>

#include "sentilex/common.hpp"

using namespace sentilex;

TEST(Common, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Common, RngIsReproducible) {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    (void)c;
  }
  EXPECT_NE(Rng(7).next(), Rng(8).next());
}

TEST(Common, UniformStaysInRange) {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform(-1, 1);
    ASSERT_GE(u, -1.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(r.index(7), 7u);
  }
}

TEST(Common, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
  EXPECT_NE(derive_seed(1, std::uint64_t{0}), derive_seed(1, std::uint64_t{1}));
  EXPECT_EQ(derive_seed(3, "x"), derive_seed(3, "x"));
}

TEST(Common, FormatFixedHasNoNegativeZero) {
  EXPECT_EQ(format_fixed(-0.0), "0.000000");
  EXPECT_EQ(format_fixed(-1e-9), "0.000000");
  EXPECT_EQ(format_fixed(-0.25, 3), "-0.250");
}

TEST(Common, ShortestRoundTrips) {
  for (double v : {0.845, 0.1 + 0.2, -0.0, 1.0 / 3.0, 1e-300}) {
    double back = 0;
    ASSERT_TRUE(parse_double(format_shortest(v), back));
    EXPECT_EQ(back, v);
  }
  EXPECT_EQ(format_shortest(0.5), "0.5");
}

TEST(Common, ParseDoubleIsStrict) {
  double v = 0;
  EXPECT_TRUE(parse_double(" 0.75 ", v));
  EXPECT_DOUBLE_EQ(v, 0.75);
  EXPECT_FALSE(parse_double("0.75x", v));
  EXPECT_FALSE(parse_double("", v));
  EXPECT_FALSE(parse_double("nan", v));
}

TEST(Common, SplitKeepsEmptyFields) {
  const auto f = split("a\t\tb", '\t');
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[1], "");
}
