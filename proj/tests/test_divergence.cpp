#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "elr/divergence.hpp"
#include "elr/generators.hpp"
#include "test_support.hpp"

namespace {

using elr::Convexity;
using elr::Interval;
using elr::PreconditionError;
using elr::ProbabilityVector;
using elr::Theorem;
namespace t = elr::testing;

elr::FunctionModel gen(const char* name, Interval d) {
  return elr::make_generator(elr::parse_generator(name, d));
}

const ProbabilityVector kP({0.5, 0.5});
const ProbabilityVector kQ({0.25, 0.75});

TEST(FDivergence, HellingerWorkedValue) {
  double direct = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double d = std::sqrt(kQ[i]) - std::sqrt(kP[i]);
    direct += 0.5 * d * d;
  }
  const double got = elr::f_divergence(gen("hellinger", Interval(0.5, 2)), kP, kQ);
  EXPECT_NEAR(got, direct, 1e-15);
  EXPECT_NEAR(got, 0.03407417, 1e-8);
}

TEST(FDivergence, KlWorkedValue) {
  const double got = elr::f_divergence(gen("kl", Interval(0.5, 2)), kP, kQ);
  EXPECT_NEAR(got, 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(got, 0.1438410, 1e-6);
}

TEST(FDivergence, EqualDistributionsGiveZero) {
  const ProbabilityVector p({0.1, 0.2, 0.3, 0.4});
  for (const char* name : {"kl", "hellinger", "jeffreys"}) {
    EXPECT_NEAR(elr::f_divergence(gen(name, Interval(0.5, 2)), p, p), 0.0, 1e-12) << name;
  }
}

TEST(FDivergence, ZeroConventions) {
  const ProbabilityVector p({0.0, 0.5, 0.5});
  const ProbabilityVector q({0.5, 0.5, 0.0});
  // Hellinger: q_0 f(0+) + p_2 lim f(t)/t = 0.5*0.5 + 0.5*0.5
  EXPECT_NEAR(elr::f_divergence(gen("hellinger", Interval(0.5, 2)), p, q), 0.5, 1e-15);
  EXPECT_TRUE(std::isinf(elr::f_divergence(gen("kl", Interval(0.5, 2)), p, q)));
  const ProbabilityVector both({0.0, 1.0});
  EXPECT_NEAR(elr::f_divergence(gen("kl", Interval(0.5, 2)), both, both), 0.0, 1e-15);
  EXPECT_THROW(elr::f_divergence(gen("exp", Interval(0.5, 2)), p, q), PreconditionError);
}

TEST(FDivergence, LengthMismatch) {
  EXPECT_THROW(elr::f_divergence(gen("kl", Interval(0.5, 2)), kP, ProbabilityVector({1.0})),
               PreconditionError);
}

TEST(ProbabilityVectorTest, Validation) {
  EXPECT_THROW(ProbabilityVector({}), PreconditionError);
  EXPECT_THROW(ProbabilityVector({0.5, 0.6}), PreconditionError);
  EXPECT_THROW(ProbabilityVector({1.5, -0.5}), PreconditionError);
  EXPECT_NO_THROW(ProbabilityVector({0.1, 0.2, 0.7}));
}

TEST(RatioRange, Examples) {
  const auto rr = elr::ratio_range(kP, kQ);
  EXPECT_DOUBLE_EQ(rr.a, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(rr.b, 2.0);
  const auto same = elr::ratio_range(kP, kP);
  EXPECT_TRUE(same.degenerate());
  EXPECT_THROW(same.interval(), PreconditionError);
  EXPECT_THROW(elr::ratio_range(kP, ProbabilityVector({1.0, 0.0})), PreconditionError);
}

TEST(DivergenceBounds, CubeTm23AtEndpointRatios) {
  const auto f = t::polynomial({0, 0, 0, 1}, Interval(2.0 / 3.0, 2.0));
  const auto d = elr::divergence_bounds(f, kP, kQ, 3, 1, Theorem::tm23, Convexity::convex);
  // LR = D - chord(1); the ratios sit on the endpoints, so everything is 0.
  EXPECT_NEAR(d.report.lr, d.divergence - d.chord_at_one, 1e-15);
  EXPECT_NEAR(d.divergence_gap, -d.report.lr, 1e-15);
  EXPECT_TRUE(d.report.holds());
  EXPECT_LE(d.delegation_discrepancy, 1e-12);
}

TEST(DivergenceBounds, CubeTm23WithInteriorRatio) {
  const ProbabilityVector p({0.2, 0.5, 0.3});
  const ProbabilityVector q({0.4, 0.25, 0.35});
  const auto rr = elr::ratio_range(p, q);
  const auto f = t::polynomial({0, 0, 0, 1}, rr.interval());
  const auto d = elr::divergence_bounds(f, p, q, 3, 1, Theorem::tm23, Convexity::convex);
  EXPECT_NEAR(d.report.lr, d.divergence - d.chord_at_one, 1e-14);
  EXPECT_LT(*d.report.lower, d.report.lr);
  EXPECT_LT(d.report.lr, *d.report.upper);
  EXPECT_NEAR(*d.direct_lower, *d.report.lower, 1e-12);
  EXPECT_NEAR(*d.direct_upper, *d.report.upper, 1e-12);
}

TEST(DivergenceBounds, JeffreysTm24) {
  const ProbabilityVector p({0.2, 0.5, 0.3});
  const ProbabilityVector q({0.4, 0.25, 0.35});
  const auto spec = elr::parse_generator("jeffreys", elr::ratio_range(p, q).interval());
  ASSERT_EQ(elr::classify(spec, 3), elr::ConvexityVerdict::concave);
  const auto d = elr::divergence_bounds(elr::make_generator(spec), p, q, 3, 1, Theorem::tm24,
                                        Convexity::concave);
  EXPECT_TRUE(d.report.direction_valid);
  EXPECT_TRUE(d.report.holds());
}

TEST(DivergenceBounds, EqualDistributionsNeedAnInterval) {
  const ProbabilityVector p({0.3, 0.7});
  const auto f = t::polynomial({1, -2, 0.5}, Interval(0.5, 1.5));
  EXPECT_THROW(elr::divergence_bounds(f, p, p, 3, 1, Theorem::tm23, Convexity::convex),
               PreconditionError);
  const auto d = elr::divergence_bounds(f, p, p, 3, 1, Theorem::tm23, Convexity::convex,
                                        Interval(0.5, 1.5));
  EXPECT_NEAR(*d.report.lower, d.report.lr, 1e-12);
  EXPECT_NEAR(*d.report.upper, d.report.lr, 1e-12);
}

TEST(DivergenceBounds, IntervalMustContainRatiosAndOne) {
  const auto f = gen("kl", Interval(0.1, 3));
  EXPECT_THROW(elr::divergence_bounds(f, kP, kQ, 3, 1, Theorem::tm23, Convexity::concave,
                                      Interval(0.7, 2.0)),
               PreconditionError);
  EXPECT_NO_THROW(elr::divergence_bounds(f, kP, kQ, 3, 1, Theorem::tm23, Convexity::concave,
                                         Interval(0.5, 2.5)));
}

// --- properties -------------------------------------------------------------

std::vector<double> random_distribution(t::Rng& rng, int r) {
  std::vector<double> v(static_cast<std::size_t>(r));
  double s = 0;
  for (double& x : v) {
    x = rng.uniform(0.05, 1);
    s += x;
  }
  for (double& x : v) x /= s;
  return v;
}

TEST(DivergenceProperty, FunctionalMeanIsOneAndDelegationAgrees) {
  t::Rng rng(83);
  const Theorem all[] = {Theorem::tm21, Theorem::tm22, Theorem::cor21, Theorem::tm23, Theorem::tm24};
  for (int trial = 0; trial < 100; ++trial) {
    const ProbabilityVector p(random_distribution(rng, rng.integer(2, 12)));
    const ProbabilityVector q(random_distribution(rng, static_cast<int>(p.size())));
    const auto rr = elr::ratio_range(p, q);
    double mean = 0;
    for (std::size_t i = 0; i < p.size(); ++i) mean += q[i] * (p[i] / q[i]);
    EXPECT_NEAR(mean, 1.0, 1e-12);
    const auto spec = elr::parse_generator(rng.integer(0, 1) ? "kl" : "hellinger", rr.interval());
    const Theorem th = all[rng.integer(0, 4)];
    const int n = th == Theorem::cor21 ? 5 : rng.integer(4, 6);
    const int m = rng.integer(3, n - 1);
    const auto c = elr::classify(spec, n) == elr::ConvexityVerdict::convex ? Convexity::convex
                                                                          : Convexity::concave;
    const auto d = elr::divergence_bounds(elr::make_generator(spec), p, q, n, m, th, c);
    EXPECT_LE(d.delegation_discrepancy, 1e-12);
    EXPECT_TRUE(d.report.holds()) << trial;
  }
}

TEST(DivergenceProperty, NonNegativeForConvexGenerators) {
  t::Rng rng(89);
  for (int trial = 0; trial < 200; ++trial) {
    const ProbabilityVector p(random_distribution(rng, rng.integer(2, 10)));
    const ProbabilityVector q(random_distribution(rng, static_cast<int>(p.size())));
    for (const char* name : {"kl", "hellinger", "jeffreys"}) {
      EXPECT_GE(elr::f_divergence(gen(name, Interval(0.5, 2)), p, q), -1e-12);
    }
  }
}

}  // namespace
