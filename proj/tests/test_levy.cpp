#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "mucogarch/levy.hpp"
#include "support.hpp"

using namespace mucogarch;

TEST(CompoundPoissonSpec, Validation) {
  EXPECT_THROW(CompoundPoissonSpec(-1.0, GaussianLaw{1.0}, 2), InvalidArgument);
  EXPECT_THROW(CompoundPoissonSpec(1.0, GaussianLaw{0.0}, 2), InvalidArgument);
  EXPECT_THROW(CompoundPoissonSpec(1.0, BallUniformLaw{-1.0}, 2), InvalidArgument);
  EXPECT_THROW(CompoundPoissonSpec(1.0, TruncatedGaussianLaw{1.0, 0.0}, 2), InvalidArgument);
  EXPECT_THROW(CompoundPoissonSpec(1.0, PointMassMixture{{Vector::Unit(2, 0)}, {0.9}}, 2),
               InvalidArgument);
  EXPECT_THROW(CompoundPoissonSpec(1.0, PointMassMixture{{Vector::Unit(3, 0)}, {1.0}}, 2),
               InvalidArgument);
  EXPECT_THROW(CompoundPoissonSpec(1.0, GaussianLaw{1.0}, 0), InvalidArgument);
  EXPECT_NO_THROW(CompoundPoissonSpec(0.0, GaussianLaw{1.0}, 2));
  EXPECT_NO_THROW(CompoundPoissonSpec(
      1.0, PointMassMixture{{Vector::Unit(2, 0), Vector::Unit(2, 1)}, {0.25, 0.75}}, 2));
}

TEST(JumpTrain, TinyRateIsAlmostAlwaysEmpty) {
  const CompoundPoissonSpec spec(1e-9, GaussianLaw{1.0}, 2);
  int empty = 0;
  for (std::uint64_t s = 0; s < 100000; ++s) empty += sample_jump_train(spec, 1.0, s).size() == 0;
  EXPECT_GE(empty, 99990);
}

TEST(JumpTrain, MeanCountAndPoissonGoodnessOfFit) {
  const double rate = 2.0, horizon = 3.0, mu = rate * horizon;
  const CompoundPoissonSpec spec(rate, GaussianLaw{1.0}, 2);
  const int n = 100000;
  const int top = 16;  // bins 0..15 and a tail bin
  std::vector<double> counts(top + 1, 0.0);
  double sum = 0.0;
  for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(n); ++s) {
    const std::size_t k = sample_jump_train(spec, horizon, s).size();
    sum += static_cast<double>(k);
    counts[std::min<std::size_t>(k, top)] += 1.0;
  }
  EXPECT_NEAR(sum / n, 6.0, 0.1);

  const boost::math::poisson_distribution<double> pois(mu);
  double chi2 = 0.0;
  int bins = 0;
  double tail_expected = n;
  for (int k = 0; k < top; ++k) {
    const double expected = n * boost::math::pdf(pois, k);
    tail_expected -= expected;
    chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
    ++bins;
  }
  chi2 += (counts[top] - tail_expected) * (counts[top] - tail_expected) / tail_expected;
  ++bins;
  const boost::math::chi_squared_distribution<double> ref(bins - 1);
  EXPECT_LT(chi2, boost::math::quantile(ref, 0.999));
}

TEST(JumpTrain, DeterministicAndStrictlyIncreasing) {
  const CompoundPoissonSpec spec(5.0, GaussianLaw{1.0}, 3);
  const JumpTrain a = sample_jump_train(spec, 4.0, 77);
  const JumpTrain b = sample_jump_train(spec, 4.0, 77);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.times[i], b.times[i]);
    EXPECT_EQ(a.marks[i], b.marks[i]);
    EXPECT_GT(a.times[i], 0.0);
    EXPECT_LE(a.times[i], 4.0);
    if (i > 0) EXPECT_GT(a.times[i], a.times[i - 1]);
  }
  EXPECT_THROW(sample_jump_train(spec, 0.0, 1), InvalidArgument);
}

TEST(JumpTrain, EarlyMarksDoNotDependOnHorizon) {
  const CompoundPoissonSpec spec(3.0, GaussianLaw{1.0}, 2);
  const JumpTrain a = sample_jump_train(spec, 2.0, 5);
  const JumpTrain b = sample_jump_train(spec, 7.0, 5);
  const std::size_t n = std::min(a.size(), b.size());
  ASSERT_GT(n, 0u);
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(a.marks[i], b.marks[i]);
}

TEST(JumpLaws, GaussianSecondMoment) {
  const CompoundPoissonSpec spec(1.0, GaussianLaw{1.0}, 2);
  Engine rng(3);
  double s = 0.0;
  for (int i = 0; i < 100000; ++i) s += spec.sample_mark(rng).squaredNorm();
  EXPECT_NEAR(s / 100000, 2.0, 0.05);
}

TEST(JumpLaws, SupportsAreRespected) {
  Engine rng(4);
  const CompoundPoissonSpec ball(1.0, BallUniformLaw{0.7}, 3);
  const CompoundPoissonSpec trunc(1.0, TruncatedGaussianLaw{2.0, 1.5}, 2);
  double r2 = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Vector x = ball.sample_mark(rng);
    EXPECT_LE(x.norm(), 0.7 + 1e-15);
    r2 += x.squaredNorm();
    EXPECT_LE(trunc.sample_mark(rng).norm(), 1.5 + 1e-15);
  }
  // E||X||^2 = r^2 d / (d + 2) for the uniform law on a ball
  EXPECT_NEAR(r2 / 100000, 0.49 * 3.0 / 5.0, 0.005);
}

TEST(JumpLaws, MixtureFrequencies) {
  const CompoundPoissonSpec spec(
      1.0, PointMassMixture{{Vector::Unit(2, 0), Vector::Unit(2, 1)}, {0.25, 0.75}}, 2);
  Engine rng(5);
  int first = 0;
  for (int i = 0; i < 100000; ++i) first += spec.sample_mark(rng)(0) == 1.0;
  EXPECT_NEAR(first / 100000.0, 0.25, 0.006);
}

TEST(LevyIntegral, Examples) {
  const CompoundPoissonSpec pm(2.0, testsupport::point_mass_e1(2), 2);
  const Estimate one = levy_integral(pm, [](const Vector&) { return 1.0; }, 0, 1);
  EXPECT_EQ(one.value, 2.0);
  EXPECT_EQ(one.std_error, 0.0);
  const Estimate vv = levy_integral(
      pm, [](const Vector& y) { return vec(Matrix(y * y.transpose())).norm(); }, 0, 1);
  EXPECT_EQ(vv.value, 2.0);

  const CompoundPoissonSpec g(3.0, GaussianLaw{1.0}, 2);
  const Estimate r = levy_integral(g, [](const Vector&) { return 1.0; }, 1000, 2);
  EXPECT_DOUBLE_EQ(r.value, 3.0);
  const Estimate sq = levy_integral(g, [](const Vector& y) { return y.squaredNorm(); }, 200000, 3);
  EXPECT_NEAR(sq.value, 6.0, 4.0 * sq.std_error);
  EXPECT_GT(sq.std_error, 0.0);
}

TEST(LevyIntegral, NonFiniteIntegrandSignals) {
  const CompoundPoissonSpec g(1.0, GaussianLaw{1.0}, 1);
  EXPECT_THROW(levy_integral(g, [](const Vector&) { return std::nan(""); }, 10, 1), NumericalDefect);
  const CompoundPoissonSpec pm(1.0, testsupport::point_mass_e1(1), 1);
  EXPECT_THROW(levy_integral(pm, [](const Vector&) { return INFINITY; }, 10, 1), NumericalDefect);
}

TEST(LevyIntegral, LinearityAndPositivity) {
  const CompoundPoissonSpec g(1.5, BallUniformLaw{2.0}, 2);
  const auto f1 = [](const Vector& y) { return y.squaredNorm(); };
  const auto f2 = [](const Vector& y) { return std::abs(y(0)); };
  const Estimate a = levy_integral(g, f1, 5000, 9);
  const Estimate b = levy_integral(g, f2, 5000, 9);
  const Estimate c = levy_integral(g, [&](const Vector& y) { return 2.0 * f1(y) + 3.0 * f2(y); }, 5000, 9);
  // shared seed: linearity holds sample by sample
  EXPECT_NEAR(c.value, 2.0 * a.value + 3.0 * b.value, 1e-12 * c.value);
  EXPECT_GE(a.value, 0.0);
}

TEST(Moment2p, Examples) {
  const CompoundPoissonSpec pm(1.0, testsupport::point_mass_e1(2), 2);
  const MomentCheck m = moment_2p_finite(pm, 1.0, 0, 1);
  EXPECT_TRUE(m.finite);
  EXPECT_EQ(m.value.value, 1.0);

  const CompoundPoissonSpec ball(2.5, BallUniformLaw{1.0}, 3);
  for (double p : {0.5, 1.0, 3.0}) EXPECT_LE(moment_2p_finite(ball, p, 2000, 2).value.value, 2.5);

  const CompoundPoissonSpec g(1.7, GaussianLaw{1.0}, 1);
  const MomentCheck mg = moment_2p_finite(g, 1.0, 200000, 3);
  EXPECT_NEAR(mg.value.value, 1.7, 4.0 * mg.value.std_error);
  EXPECT_THROW(moment_2p_finite(g, 0.0, 10, 1), InvalidArgument);
}

TEST(SecondMoment, ClosedForms) {
  const CompoundPoissonSpec g(2.0, GaussianLaw{0.5}, 2);
  EXPECT_LE((*second_moment_closed_form(g) - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-15);
  const CompoundPoissonSpec b(1.0, BallUniformLaw{2.0}, 2);
  EXPECT_LE((*second_moment_closed_form(b) - Matrix::Identity(2, 2)).norm(), 1e-15);
  const CompoundPoissonSpec t(1.0, TruncatedGaussianLaw{1.0, 1.0}, 2);
  EXPECT_FALSE(second_moment_closed_form(t).has_value());
}
