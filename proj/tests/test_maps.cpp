#include <random>

#include <gtest/gtest.h>

#include "hvrfif/error.hpp"
#include "hvrfif/maps.hpp"

using namespace hvrfif;

TEST(AffineMap, IncreasingExample) {
  const auto L = build_affine_map({0, 0.5}, {0, 0.25}, Orientation::increasing);
  EXPECT_DOUBLE_EQ(L.slope, 0.5);
  EXPECT_DOUBLE_EQ(L.intercept, 0.0);
  EXPECT_EQ(L(0.0), 0.0);
  EXPECT_EQ(L(0.5), 0.25);
}

TEST(AffineMap, DecreasingExample) {
  const auto L = build_affine_map({0, 0.5}, {0, 0.25}, Orientation::decreasing);
  EXPECT_DOUBLE_EQ(L.slope, -0.5);
  EXPECT_DOUBLE_EQ(L.intercept, 0.25);
  EXPECT_EQ(L(0.0), 0.25);
  EXPECT_EQ(L(0.5), 0.0);
}

TEST(AffineMap, ShiftedRegion) {
  const auto L = build_affine_map({0, 0.5}, {0.25, 0.5}, Orientation::increasing);
  EXPECT_DOUBLE_EQ(L.slope, 0.5);
  EXPECT_DOUBLE_EQ(L.intercept, 0.25);
}

TEST(AffineMap, RejectsExpansion) {
  try {
    build_affine_map({0, 0.25}, {0, 0.5}, Orientation::increasing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotContractive);
  }
}

TEST(AffineMap, InverseRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto o : {Orientation::increasing, Orientation::decreasing}) {
    const auto L = build_affine_map({0.1, 0.9}, {0.3, 0.45}, o);
    for (int j = 0; j < 1000; ++j) {
      const double x = 0.1 + 0.8 * u(rng);
      EXPECT_NEAR(L.inverse(L(x)), x, 1e-14);
    }
  }
}

TEST(PiecewiseMap, KnotsReproducedExactly) {
  const PiecewiseAffineMap m({0.0, 0.3, 1.0}, {0.2, 0.25, 0.9});
  EXPECT_EQ(m(0.0), 0.2);
  EXPECT_EQ(m(0.3), 0.25);
  EXPECT_EQ(m(1.0), 0.9);
  EXPECT_TRUE(m.increasing());
  EXPECT_NEAR(m.max_slope(), 0.65 / 0.7, 1e-15);
  EXPECT_NEAR(m.inverse(m(0.7)), 0.7, 1e-15);
}

TEST(PiecewiseMap, RejectsNonMonotone) {
  EXPECT_THROW(PiecewiseAffineMap({0.0, 0.5, 1.0}, {0.0, 0.6, 0.4}), Error);
  EXPECT_THROW(PiecewiseAffineMap({0.0, 0.0, 1.0}, {0.0, 0.5, 1.0}), Error);
}

TEST(PiecewiseMap, ComposeMatchesPointwise) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const PiecewiseAffineMap inner({0.0, 0.4, 1.0}, {1.0, 0.7, 0.0});
  const PiecewiseAffineMap outer({0.0, 0.5, 0.8, 1.0}, {0.0, 0.2, 0.9, 1.0});
  const auto c = compose(outer, inner);
  EXPECT_EQ(c.source().lo, 0.0);
  EXPECT_EQ(c(0.0), 1.0);
  EXPECT_EQ(c(1.0), 0.0);
  for (int j = 0; j < 1000; ++j) {
    const double x = u(rng);
    EXPECT_NEAR(c(x), outer(inner(x)), 1e-14);
  }
  const auto r = c.restricted({0.25, 0.75});
  EXPECT_NEAR(r(0.5), c(0.5), 1e-15);
  EXPECT_NEAR(c.inverse_map()(c(0.33)), 0.33, 1e-14);
}

TEST(PiecewiseMap, IdentityFlag) {
  const auto id = PiecewiseAffineMap::identity({0, 1});
  EXPECT_TRUE(id.is_identity());
  EXPECT_EQ(id(0.37), 0.37);
}

TEST(Chord, TwoPointForm) {
  const Chord c{0.25, 0.75, 1.0, -1.0};
  EXPECT_EQ(c(0.25), 1.0);
  EXPECT_EQ(c(0.75), -1.0);
  EXPECT_DOUBLE_EQ(c(0.5), 0.0);
  EXPECT_DOUBLE_EQ(c.slope(), -4.0);
  EXPECT_DOUBLE_EQ(c.sup_abs(), 1.0);
}
