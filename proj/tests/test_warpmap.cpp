#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace warpalign;
using warpalign::testing::random_warp;

namespace {

PLWarp bend() { return PLWarp({0.0, 0.5, 1.0}, {0.0, 0.25, 1.0}); }

Grid dense(std::size_t m = 2001) { return Grid::uniform(m); }

}  // namespace

TEST(Grid, RejectsBadPartitions) {
  EXPECT_THROW(Grid({0.0}), ArgumentError);
  EXPECT_THROW(Grid({0.1, 1.0}), ArgumentError);
  EXPECT_THROW(Grid({0.0, 0.9}), ArgumentError);
  EXPECT_THROW(Grid({0.0, 0.5, 0.5, 1.0}), ArgumentError);
  EXPECT_NO_THROW(Grid({0.0, 0.3, 1.0}));
}

TEST(Grid, UniformHasExactEndpoints) {
  const Grid g = Grid::uniform(7);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[6], 1.0);
  EXPECT_TRUE(g.is_uniform());
  EXPECT_FALSE(Grid({0.0, 0.1, 1.0}).is_uniform());
}

TEST(PLWarp, RejectsInvalidKnots) {
  EXPECT_THROW(PLWarp({0.0, 1.0}, {0.0, 0.9}), ArgumentError);
  EXPECT_THROW(PLWarp({0.0, 0.5, 1.0}, {0.0, 0.5}), ArgumentError);
  EXPECT_THROW(PLWarp({0.0, 0.5, 1.0}, {0.0, 0.0, 1.0}), ArgumentError);
  EXPECT_THROW(PLWarp({0.0, 0.6, 0.5, 1.0}, {0.0, 0.2, 0.3, 1.0}), ArgumentError);
}

TEST(PLWarp, EvalExamples) {
  EXPECT_EQ(PLWarp::identity().eval(0.3), 0.3);
  EXPECT_EQ(bend().eval(0.5), 0.25);
  EXPECT_DOUBLE_EQ(bend().eval(0.75), 0.625);
  EXPECT_EQ(bend().eval(0.0), 0.0);
  EXPECT_EQ(bend().eval(1.0), 1.0);
}

TEST(PLWarp, EvalOutsideDomainThrows) {
  EXPECT_THROW(bend().eval(-1e-12), DomainError);
  EXPECT_THROW(bend().eval(1.0 + 1e-12), DomainError);
  EXPECT_THROW(bend().derivative(2.0), DomainError);
  EXPECT_THROW(bend().eval(std::nan("")), DomainError);
}

TEST(PLWarp, DerivativeIsRightContinuous) {
  EXPECT_EQ(PLWarp::identity().derivative(0.4), 1.0);
  EXPECT_DOUBLE_EQ(bend().derivative(0.2), 0.5);
  EXPECT_DOUBLE_EQ(bend().derivative(0.5), 1.5);
  EXPECT_DOUBLE_EQ(bend().derivative(1.0), 1.5);
  EXPECT_DOUBLE_EQ(bend().derivative(0.0), 0.5);
}

TEST(PLWarp, FromIncrementsClampsZeros) {
  const std::vector<double> inc{0.5, 0.0, 0.5};
  const PLWarp w = PLWarp::from_increments({0.0, 0.2, 0.4, 1.0}, inc);
  EXPECT_EQ(w.knot_count(), 4u);
  EXPECT_GT(w.knot_y()[2], w.knot_y()[1]);
  EXPECT_NEAR(w.knot_y()[1], 0.5, 1e-9);
}

TEST(Inverse, Examples) {
  EXPECT_EQ(inverse(PLWarp::identity()), PLWarp::identity());
  const PLWarp inv = inverse(bend());
  EXPECT_EQ(inv, PLWarp({0.0, 0.25, 1.0}, {0.0, 0.5, 1.0}));
}

TEST(Inverse, RoundTripProperty) {
  Rng rng(11);
  const Grid g = dense();
  for (int rep = 0; rep < 50; ++rep) {
    const PLWarp w = random_warp(rng);
    const PLWarp inv = inverse(w);
    EXPECT_EQ(inverse(inv), w);
    double worst = 0.0;
    for (double t : g) worst = std::max(worst, std::abs(inv.eval(w.eval(t)) - t));
    EXPECT_LT(worst, 1e-10);
  }
}

TEST(Compose, Examples) {
  const PLWarp w = bend();
  EXPECT_EQ(compose(PLWarp::identity(), w), w);
  EXPECT_EQ(compose(w, PLWarp::identity()), w);
  const PLWarp c = compose(bend(), PLWarp({0.0, 0.25, 1.0}, {0.0, 0.5, 1.0}));
  EXPECT_NEAR(c.eval(0.25), 0.25, 1e-15);
}

TEST(Compose, InverseGivesIdentity) {
  Rng rng(12);
  for (int rep = 0; rep < 50; ++rep) {
    const PLWarp w = random_warp(rng);
    EXPECT_LT(sup_distance(compose(w, inverse(w)), PLWarp::identity()), 1e-12);
    EXPECT_LT(sup_distance(compose(inverse(w), w), PLWarp::identity()), 1e-12);
  }
}

TEST(Compose, MatchesPointwiseComposition) {
  Rng rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    const PLWarp a = random_warp(rng);
    const PLWarp b = random_warp(rng);
    const PLWarp c = random_warp(rng);
    const PLWarp ab = compose(a, b);
    for (int k = 0; k < 200; ++k) {
      const double t = rnd::uniform(rng);
      EXPECT_NEAR(ab.eval(t), a.eval(b.eval(t)), 1e-12);
    }
    // associativity
    EXPECT_LT(sup_distance(compose(compose(a, b), c), compose(a, compose(b, c))), 1e-12);
  }
}

TEST(Restrict, Examples) {
  EXPECT_EQ(restrict(PLWarp::identity(), 0.2, 0.7), PLWarp::identity());
  Rng rng(14);
  const PLWarp w = random_warp(rng);
  EXPECT_LT(sup_distance(restrict(w, 0.0, 1.0), w), 1e-15);
  EXPECT_EQ(restrict(bend(), 0.0, 0.5), PLWarp::identity());
  EXPECT_THROW(restrict(w, 0.5, 0.5), ArgumentError);
  EXPECT_THROW(restrict(w, -0.1, 0.5), ArgumentError);
}

TEST(Restrict, MatchesRescalingFormula) {
  Rng rng(15);
  for (int rep = 0; rep < 50; ++rep) {
    const PLWarp w = random_warp(rng);
    double a = rnd::uniform(rng), b = rnd::uniform(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) continue;
    const PLWarp r = restrict(w, a, b);
    for (int k = 0; k <= 100; ++k) {
      const double u = k / 100.0;
      const double expected = (w.eval(a + u * (b - a)) - w.eval(a)) / (w.eval(b) - w.eval(a));
      EXPECT_NEAR(r.eval(u), expected, 1e-9);
    }
  }
}

TEST(Blend, IsConvexCombination) {
  Rng rng(16);
  for (int rep = 0; rep < 50; ++rep) {
    const PLWarp a = random_warp(rng);
    const PLWarp b = random_warp(rng);
    const PLWarp c = blend(a, b, 0.9);
    for (int k = 0; k <= 200; ++k) {
      const double t = k / 200.0;
      EXPECT_NEAR(c.eval(t), 0.9 * a.eval(t) + 0.1 * b.eval(t), 1e-12);
    }
  }
  EXPECT_EQ(blend(bend(), PLWarp::identity(), 1.0), bend());
  EXPECT_THROW(blend(bend(), bend(), 1.5), ArgumentError);
}

TEST(SupDistance, MetricProperties) {
  Rng rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const PLWarp a = random_warp(rng);
    const PLWarp b = random_warp(rng);
    const PLWarp c = random_warp(rng);
    EXPECT_EQ(sup_distance(a, a), 0.0);
    EXPECT_EQ(sup_distance(a, b), sup_distance(b, a));
    EXPECT_LE(sup_distance(a, c), sup_distance(a, b) + sup_distance(b, c) + 1e-15);
    double dense_max = 0.0;
    for (double t : dense()) dense_max = std::max(dense_max, std::abs(a.eval(t) - b.eval(t)));
    EXPECT_GE(sup_distance(a, b), dense_max - 1e-15);
  }
}

TEST(CircularWarp, SquareMapWrapPoint) {
  const PLWarp sq = tabulate_cdf([](double t) { return t * t; }, 10001);
  const CircularWarp cw = make_circular(sq, 0.94);
  EXPECT_NEAR(cw.wrap_point(), std::sqrt(0.06), 1e-6);
  EXPECT_NEAR(cw.wrap_point(), 0.245, 0.005);
  EXPECT_DOUBLE_EQ(cw.eval(0.0), 0.94);
}

TEST(CircularWarp, IdentityCases) {
  const CircularWarp quarter = make_circular(PLWarp::identity(), 0.25);
  EXPECT_DOUBLE_EQ(quarter.wrap_point(), 0.75);
  EXPECT_DOUBLE_EQ(quarter.eval(0.5), 0.75);
  EXPECT_DOUBLE_EQ(quarter.eval(0.75), 0.0);
  EXPECT_NEAR(quarter.eval(0.9), 0.15, 1e-15);
  const CircularWarp whole = make_circular(PLWarp::identity(), 1.0);
  EXPECT_EQ(whole.wrap_point(), 0.0);
  for (double t : {0.0, 0.3, 0.99}) EXPECT_DOUBLE_EQ(whole.eval(t), t);
  EXPECT_THROW(make_circular(PLWarp::identity(), 0.0), ArgumentError);
  EXPECT_THROW(make_circular(PLWarp::identity(), 1.5), ArgumentError);
}

TEST(CircularWarp, OneSidedLimitsAtWrapPoint) {
  Rng rng(18);
  for (int rep = 0; rep < 50; ++rep) {
    const double c = 0.05 + 0.9 * rnd::uniform(rng);
    const CircularWarp cw = make_circular(random_warp(rng), c);
    const double tc = cw.wrap_point();
    EXPECT_GT(tc, 0.0);
    EXPECT_LT(tc, 1.0);
    EXPECT_NEAR(cw.lift(tc), 1.0, 1e-12);
    EXPECT_NEAR(cw.eval(std::max(0.0, tc - 1e-9)), 1.0, 1e-6);
    EXPECT_NEAR(cw.eval(std::min(1.0, tc + 1e-9)), 0.0, 1e-6);
  }
}
