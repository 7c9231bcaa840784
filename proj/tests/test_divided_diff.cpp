#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "elr/divided_diff.hpp"
#include "test_support.hpp"

namespace {

using elr::FunctionModel;
using elr::Interval;
using elr::NodeMultiset;
using elr::PreconditionError;
namespace t = elr::testing;

FunctionModel cube(Interval d = Interval(-3.0, 3.0)) { return t::polynomial({0, 0, 0, 1}, d); }

TEST(DividedDifference, QuadraticOverThreeNodesIsLeadingCoefficient) {
  const auto f = t::polynomial({0, 0, 1}, Interval(0, 2));
  EXPECT_DOUBLE_EQ(elr::divided_difference(f, NodeMultiset::from_points(std::vector{0.0, 1.0, 2.0})), 1.0);
}

TEST(DividedDifference, TripleNodeIsSecondDerivativeOverTwo) {
  const auto f = t::exp_model(Interval(-1, 1));
  EXPECT_DOUBLE_EQ(elr::divided_difference(f, NodeMultiset({{0.0, 3}})), 0.5);
}

TEST(DividedDifference, MixedConfluentCube) {
  EXPECT_DOUBLE_EQ(elr::divided_difference(cube(), NodeMultiset::two_point(0.0, 2, 1.0, 1)), 1.0);
}

TEST(DividedDifference, EntryOrderDoesNotMatter) {
  const auto f = t::exp_model(Interval(-2, 2));
  const double x = elr::divided_difference(f, NodeMultiset({{1.0, 2}, {-0.5, 1}, {0.25, 3}}));
  const double y = elr::divided_difference(f, NodeMultiset({{0.25, 3}, {1.0, 2}, {-0.5, 1}}));
  EXPECT_EQ(x, y);
}

TEST(DividedDifference, EqualValuesAcrossEntriesAreMerged) {
  const NodeMultiset s({{1.0, 1}, {0.0, 2}, {1.0, 2}});
  ASSERT_EQ(s.entries().size(), 2u);
  EXPECT_EQ(s.entries()[1].multiplicity, 3);
  EXPECT_EQ(s.total_count(), 5);
  EXPECT_EQ(s.flattened(), (std::vector<double>{0, 0, 1, 1, 1}));
}

TEST(DividedDifference, Errors) {
  const auto f = t::polynomial({1, 2, 3}, Interval(0, 1), 2);
  EXPECT_THROW(elr::divided_difference(f, NodeMultiset::from_points(std::vector{0.5, 1.5})),
               PreconditionError);
  EXPECT_THROW(elr::divided_difference(f, NodeMultiset()), PreconditionError);
  EXPECT_THROW(elr::divided_difference(f, NodeMultiset({{0.5, 4}})), PreconditionError);
  EXPECT_NO_THROW(elr::divided_difference(f, NodeMultiset({{0.5, 3}})));
  EXPECT_THROW(NodeMultiset::from_points(std::vector{0.5, 0.5 + 1e-16 * 4}), PreconditionError);
  EXPECT_THROW(NodeMultiset({{0.5, 0}}), PreconditionError);
}

TEST(NewtonInterpolant, TwoPointFormIsChord) {
  const auto f = t::exp_model(Interval(0, 1));
  const auto p = elr::newton_interpolant(f, NodeMultiset::two_point(0.0, 1, 1.0, 1));
  ASSERT_EQ(p.coeffs.size(), 2u);
  EXPECT_DOUBLE_EQ(p.coeffs[0], 1.0);
  EXPECT_NEAR(p.coeffs[1], std::numbers::e - 1.0, 1e-15);
  for (double x : {0.0, 0.3, 0.7, 1.0}) EXPECT_NEAR(p(x), 1.0 + x * (std::numbers::e - 1.0), 1e-14);
}

TEST(NewtonInterpolant, CubeAtDoubleEndpointsReconstructsAtOne) {
  const auto f = cube(Interval(0, 2));
  const auto p = elr::newton_interpolant(f, NodeMultiset::two_point(0.0, 2, 2.0, 2));
  const double r = elr::remainder_R(f, 0.0, 2.0, 2, 4, 1.0);
  // f[1;0,0;2,2] of a cubic over five nodes vanishes.
  EXPECT_NEAR(r, 0.0, 1e-12);
  EXPECT_NEAR(p(1.0) + r, 1.0, 1e-12);
}

TEST(NewtonInterpolant, ReproducesLowDegreePolynomials) {
  t::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int count = rng.integer(1, 8);
    const auto c = rng.coeffs(count - 1);
    const auto f = t::polynomial(c, Interval(-1.5, 1.5));
    std::vector<elr::NodeEntry> entries;
    const auto sites = rng.separated(count, -1.5, 1.5, 0.25);
    int left = count;
    for (std::size_t i = 0; left > 0; ++i) {
      const int mult = std::min(left, rng.integer(1, 3));
      entries.push_back({sites[i], mult});
      left -= mult;
    }
    const auto p = elr::newton_interpolant(f, NodeMultiset(entries));
    for (int i = 0; i < 10; ++i) {
      const double x = rng.uniform(-1.5, 1.5);
      EXPECT_TRUE(t::close(p(x), f(x), 1e-9, 1e-10)) << "trial " << trial << " x " << x;
    }
  }
}

TEST(HermiteMn, ChordForOneOne) {
  const auto f = t::exp_model(Interval(-1, 2));
  const auto p = elr::hermite_mn(f, -1.0, 2.0, 1, 2);
  EXPECT_NEAR(p(-1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(p(2.0), std::exp(2.0), 1e-14);
  EXPECT_EQ(p.coeffs.size(), 2u);
}

TEST(HermiteMn, ExpTwoOneCoefficients) {
  const auto f = t::exp_model(Interval(0, 1));
  const auto p = elr::hermite_mn(f, 0.0, 1.0, 2, 3);
  ASSERT_EQ(p.coeffs.size(), 3u);
  EXPECT_DOUBLE_EQ(p.coeffs[0], 1.0);
  EXPECT_DOUBLE_EQ(p.coeffs[1], 1.0);
  EXPECT_NEAR(p.coeffs[2], std::numbers::e - 2.0, 1e-15);
}

TEST(HermiteMn, MatchesDerivativesAtBothEnds) {
  const auto f = t::exp_model(Interval(-0.5, 1.5));
  for (int n = 2; n <= 8; ++n) {
    for (int m = 1; m <= n - 1; ++m) {
      const auto p = elr::hermite_mn(f, -0.5, 1.5, m, n);
      const auto da = p.derivatives(-0.5, m - 1);
      const auto db = p.derivatives(1.5, n - m - 1);
      for (int i = 0; i < m; ++i) EXPECT_TRUE(t::close(da[i], std::exp(-0.5), 1e-9)) << n << m << i;
      for (int i = 0; i < n - m; ++i) EXPECT_TRUE(t::close(db[i], std::exp(1.5), 1e-9)) << n << m << i;
    }
  }
}

TEST(HermiteMn, RejectsBadSplit) {
  const auto f = t::exp_model(Interval(0, 1));
  EXPECT_THROW(elr::hermite_mn(f, 0.0, 1.0, 0, 3), PreconditionError);
  EXPECT_THROW(elr::hermite_mn(f, 0.0, 1.0, 3, 3), PreconditionError);
  EXPECT_THROW(elr::hermite_mn(f, 1.0, 0.0, 1, 3), PreconditionError);
  const auto low = t::polynomial({1, 1}, Interval(0, 1), 1);
  EXPECT_THROW(elr::hermite_mn(low, 0.0, 1.0, 2, 3), PreconditionError);
}

TEST(Remainder, CubeValues) {
  const auto f = cube(Interval(0, 2));
  EXPECT_NEAR(elr::remainder_R(f, 0.0, 2.0, 1, 3, 1.0), 1.0, 1e-14);
  EXPECT_NEAR(elr::remainder_Rstar(f, 0.0, 2.0, 1, 3, 1.0), -1.0, 1e-14);
}

TEST(Remainder, VanishesExactlyAtEndpoints) {
  const auto f = t::exp_model(Interval(0, 2));
  for (int n = 2; n <= 6; ++n) {
    for (int m = 1; m < n; ++m) {
      EXPECT_EQ(elr::remainder_R(f, 0.0, 2.0, m, n, 0.0), 0.0);
      EXPECT_EQ(elr::remainder_R(f, 0.0, 2.0, m, n, 2.0), 0.0);
      EXPECT_EQ(elr::remainder_Rstar(f, 0.0, 2.0, m, n, 2.0), 0.0);
      EXPECT_EQ(elr::remainder_Rstar(f, 0.0, 2.0, m, n, 0.0), 0.0);
    }
  }
}

TEST(Remainder, AnnihilatesLowDegreePolynomials) {
  t::Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(2, 8);
    const int m = rng.integer(1, n - 1);
    const auto f = t::polynomial(rng.coeffs(rng.integer(0, n - 1)), Interval(-1, 2));
    const double x = rng.uniform(-1, 2);
    EXPECT_NEAR(elr::remainder_R(f, -1.0, 2.0, m, n, x), 0.0, 1e-12);
    EXPECT_NEAR(elr::remainder_Rstar(f, -1.0, 2.0, m, n, x), 0.0, 1e-12);
  }
}

TEST(Remainder, RejectsPointsOutsideInterval) {
  const auto f = t::exp_model(Interval(0, 2));
  EXPECT_THROW(elr::remainder_R(f, 0.0, 1.0, 1, 3, 1.5), PreconditionError);
  EXPECT_THROW(elr::remainder_Rstar(f, 0.0, 1.0, 0, 3, 0.5), PreconditionError);
}

// --- properties -------------------------------------------------------------

TEST(DividedDifferenceProperty, PermutationSymmetry) {
  t::Rng rng(21);
  const auto f = t::exp_model(Interval(-2, 2));
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(static_cast<std::size_t>(rng.integer(1, 6)));
    for (double& v : x) v = rng.uniform(-2, 2);
    const double ref = elr::divided_difference(f, NodeMultiset::from_points(x));
    std::sort(x.begin(), x.end());
    do {
      // from_points sorts internally, so evaluate the raw Lagrange form too.
      const double y = elr::divided_difference(f, NodeMultiset::from_points(x));
      EXPECT_TRUE(t::close(y, ref, 1e-12)) << trial;
    } while (std::next_permutation(x.begin(), x.end()));
    EXPECT_TRUE(t::close(ref, t::lagrange_divided_difference([](double s) { return std::exp(s); }, x),
                         1e-6))
        << trial;
  }
}

TEST(DividedDifferenceProperty, MatchesSymmetricFunctionOracleWithRepeats) {
  t::Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = rng.coeffs(rng.integer(0, 9));
    const auto f = t::polynomial(c, Interval(-1.5, 1.5));
    std::vector<elr::NodeEntry> entries;
    for (double x : rng.separated(rng.integer(1, 3), -1.5, 1.5, 0.25)) {
      entries.push_back({x, rng.integer(1, 3)});
    }
    const NodeMultiset s(entries);
    const double got = elr::divided_difference(f, s);
    const double want = t::poly_divided_difference(c, s.flattened());
    EXPECT_TRUE(t::close(got, want, 1e-8, 1e-9)) << trial << ": " << got << " vs " << want;
  }
}

TEST(DividedDifferenceProperty, PolynomialAnnihilationAndLeadingCoefficient) {
  t::Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = rng.integer(0, 7);
    const auto c = rng.coeffs(d);
    const auto f = t::polynomial(c, Interval(-1, 1));
    const int extra = rng.integer(0, 2);  // 0: exact count, else surplus
    const auto x = rng.separated(d + 1 + extra, -1, 1, 0.1);
    const double got = elr::divided_difference(f, NodeMultiset::from_points(x));
    if (extra == 0) {
      EXPECT_TRUE(t::close(got, c.back(), 1e-10)) << trial;
    } else {
      EXPECT_NEAR(got, 0.0, 1e-10 * (1 + std::abs(c.back()))) << trial;
    }
  }
}

TEST(DividedDifferenceProperty, RecursionConsistency) {
  t::Rng rng(13);
  const auto f = t::exp_model(Interval(-1, 1));
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(static_cast<std::size_t>(rng.integer(2, 6)));
    for (double& v : x) v = rng.uniform(-1, 1);
    std::sort(x.begin(), x.end());
    bool spread = true;
    for (std::size_t i = 1; i < x.size(); ++i) spread = spread && x[i] - x[i - 1] > 0.05;
    if (!spread) continue;
    const std::vector<double> head(x.begin(), x.end() - 1);
    const std::vector<double> tail(x.begin() + 1, x.end());
    const double lhs = (elr::divided_difference(f, NodeMultiset::from_points(tail)) -
                        elr::divided_difference(f, NodeMultiset::from_points(head))) /
                       (x.back() - x.front());
    EXPECT_NEAR(lhs, elr::divided_difference(f, NodeMultiset::from_points(x)), 1e-11) << trial;
  }
}

TEST(HermiteMnProperty, Reconstruction) {
  t::Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const double a = rng.uniform(-2, 0);
    const double b = a + rng.uniform(0.3, 2.5);
    const int n = rng.integer(2, 8);
    const int m = rng.integer(1, n - 1);
    const auto f = t::exp_model(Interval(a, b));
    const auto p = elr::hermite_mn(f, a, b, m, n);
    for (int i = 0; i < 20; ++i) {
      const double x = rng.uniform(a, b);
      EXPECT_TRUE(t::close(p(x) + elr::remainder_R(f, a, b, m, n, x), std::exp(x), 1e-9))
          << trial << " " << x;
    }
  }
}

TEST(HermiteMnProperty, MirrorRemainderReconstruction) {
  // R* is the remainder of the interpolant with the multiplicities swapped.
  t::Rng rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.integer(2, 7);
    const int m = rng.integer(1, n - 1);
    const auto f = t::exp_model(Interval(0, 1.5));
    const auto p = elr::newton_interpolant(f, NodeMultiset::two_point(1.5, m, 0.0, n - m));
    const double x = rng.uniform(0, 1.5);
    EXPECT_TRUE(t::close(p(x) + elr::remainder_Rstar(f, 0.0, 1.5, m, n, x), std::exp(x), 1e-9));
  }
}

TEST(FunctionModelProperty, FirstDerivativeMatchesCentralDifference) {
  const auto f = t::exp_model(Interval(-1, 1));
  for (double x : {-0.7, 0.0, 0.4}) {
    const double h = 1e-5;
    EXPECT_NEAR(f.derivative(1, x), (f(x + h) - f(x - h)) / (2 * h), 1e-8);
  }
}

}  // namespace
