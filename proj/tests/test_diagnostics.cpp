#include "postproj/diagnostics.hpp"
#include "postproj/samplers.hpp"

#include <gtest/gtest.h>

using namespace postproj;

TEST(CredibleInterval, NormalQuantiles) {
  const auto x = sample_normal(0.0, 1.0, 1000000, RngStream{50, 0});
  const auto ci = credible_interval(x, 0.95);
  EXPECT_NEAR(ci.lower, -1.959963984540054, 0.02);
  EXPECT_NEAR(ci.upper, 1.959963984540054, 0.02);
}

TEST(CredibleInterval, UniformAndConstant) {
  Engine eng(51);
  std::vector<double> u(100000);
  for (auto& v : u) v = rng::uniform(eng);
  const auto ci = credible_interval(u, 0.5);
  EXPECT_NEAR(ci.lower, 0.25, 0.01);
  EXPECT_NEAR(ci.upper, 0.75, 0.01);
  const std::vector<double> c(200, 3.5);
  EXPECT_EQ(credible_interval(c, 0.9).lower, 3.5);
  EXPECT_EQ(credible_interval(c, 0.9).upper, 3.5);
  EXPECT_THROW(credible_interval(std::vector<double>(99, 1.0), 0.9), InvalidInput);
}

TEST(SortedQuantile, LinearInterpolation) {
  const std::vector<double> s{1.0, 2.0, 4.0, 8.0};
  EXPECT_DOUBLE_EQ(sorted_quantile(s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(s, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(s, 1.0), 8.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(s, 0.25), 1.75);
}

TEST(Lag1Autocorrelation, WhiteNoiseAndAr1) {
  const std::size_t L = 10000;
  const auto x = sample_normal(0.0, 1.0, L, RngStream{52, 0});
  EXPECT_LT(std::abs(lag1_autocorrelation(x)), 2.0 / std::sqrt(static_cast<double>(L)) * 1.5);

  Engine eng(53);
  std::vector<double> ar(L);
  ar[0] = rng::standard_normal(eng) / std::sqrt(1 - 0.81);
  for (std::size_t t = 1; t < L; ++t) ar[t] = 0.9 * ar[t - 1] + rng::standard_normal(eng);
  EXPECT_NEAR(lag1_autocorrelation(ar), 0.9, 0.02);
  EXPECT_THROW(lag1_autocorrelation(std::vector<double>(200, 1.0)), Degenerate);
}

TEST(EffectiveSampleSize, IndependentAndCorrelatedChains) {
  const std::size_t L = 20000;
  const auto x = sample_normal(0.0, 1.0, L, RngStream{54, 0});
  EXPECT_NEAR(effective_sample_size(x) / L, 1.0, 0.1);
  Engine eng(55);
  std::vector<double> ar(L);
  ar[0] = 0.0;
  for (std::size_t t = 1; t < L; ++t) ar[t] = 0.9 * ar[t - 1] + rng::standard_normal(eng);
  // (1 - rho) / (1 + rho) for AR(1).
  EXPECT_NEAR(effective_sample_size(ar) / L, 0.1 / 1.9, 0.02);
}

TEST(MadFit, Examples) {
  const Matrix t = (Matrix(2, 2) << 10, 0, 0, 10).finished();
  EXPECT_DOUBLE_EQ(mad_fit(t, (Matrix(2, 2) << 1, 0, 0, 1).finished()), 0.0);
  EXPECT_DOUBLE_EQ(mad_fit(t, Matrix::Constant(2, 2, 0.5)), 5.0);
  EXPECT_THROW(mad_fit(t, Matrix::Constant(2, 3, 0.5)), ShapeError);
}

TEST(MadFit, DecreasesTowardsEmpiricalProportions) {
  const Matrix t = (Matrix(2, 3) << 3, 5, 2, 1, 1, 8).finished();
  const Matrix emp = t.array().colwise() / t.rowwise().sum().array();
  const Matrix start = Matrix::Constant(2, 3, 1.0 / 3.0);
  double prev = kInf;
  for (double s = 0.0; s <= 1.0 + 1e-12; s += 0.1) {
    const double m = mad_fit(t, (1 - s) * start + s * emp);
    EXPECT_LE(m, prev + 1e-12);
    prev = m;
  }
  EXPECT_NEAR(prev, 0.0, 1e-12);
}

TEST(KsStatistic, KnownValuesAndCriticalValue) {
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{3, 4, 5, 6};
  EXPECT_DOUBLE_EQ(ks_statistic(a, b), 0.5);
  EXPECT_DOUBLE_EQ(ks_statistic(a, a), 0.0);
  // c(0.01) = sqrt(-ln(0.005) / 2); with n = m = 10000 the value scales by sqrt(2 / 10000).
  EXPECT_NEAR(ks_critical_value(10000, 10000), 1.62762363071873 * std::sqrt(2.0 / 10000), 1e-12);
}

TEST(KsStatistic, SameDistributionPassesShiftFails) {
  const auto a = sample_normal(0.0, 1.0, 10000, RngStream{56, 0});
  const auto b = sample_normal(0.0, 1.0, 10000, RngStream{56, 1});
  const auto c = sample_normal(0.1, 1.0, 10000, RngStream{56, 2});
  EXPECT_LT(ks_statistic(a, b), ks_critical_value(10000, 10000));
  EXPECT_GT(ks_statistic(a, c), ks_critical_value(10000, 10000));
}

TEST(SummarizeDraws, ColumnSummaries) {
  Matrix d(1000, 2);
  Engine eng(57);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    d(i, 0) = rng::standard_normal(eng);
    d(i, 1) = 2.0;
  }
  const auto ps = summarize_draws(d, {"a", "b"}, 0.9);
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps[0].name, "a");
  EXPECT_TRUE(ps[0].lag1.has_value());
  EXPECT_TRUE(ps[0].ess.has_value());
  EXPECT_LE(ps[0].ci_lower, ps[0].mean);
  EXPECT_GE(ps[0].ci_upper, ps[0].mean);
  EXPECT_FALSE(ps[1].lag1.has_value());
  EXPECT_EQ(ps[1].ci_lower, 2.0);
  EXPECT_THROW(summarize_draws(d, {"a"}, 0.9), ShapeError);
}

TEST(ContractionCurve, GaussianDominationAndFeasibility) {
  ContractionConfig cfg;
  cfg.replicates = 50;
  cfg.samples = 1000;
  const auto rep = contraction_curve(cfg, RngStream{58, 0});
  ASSERT_EQ(rep.n_values.size(), 3u);
  EXPECT_EQ(rep.domination_violations, 0u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(rep.radii[k], 3.0 / std::sqrt(static_cast<double>(rep.n_values[k])), 1e-15);
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      EXPECT_LE(rep.replicate_projected[k][r], rep.replicate_unconstrained[k][r]);
      EXPECT_GE(rep.replicate_projected[k][r], 0.0);
      EXPECT_LE(rep.replicate_unconstrained[k][r], 1.0);
    }
  }
  cfg.theta0 = Vector::Constant(1, -1.0);
  EXPECT_THROW(contraction_curve(cfg, RngStream{58, 0}), InvalidInput);
}

TEST(ContractionCurve, MassAtThreeRadiiMatchesTheSamplingDistribution) {
  // The posterior is centred at xbar ~ Normal(theta0, 1/n), so theta - theta0
  // is Normal(0, 2/n) marginally: mass outside 3/sqrt(n) is 2 Phi(-3/sqrt 2).
  ContractionConfig cfg;
  cfg.theta0 = Vector::Constant(1, 1.0);
  cfg.replicates = 400;
  cfg.samples = 1000;
  cfg.n_values = {100};
  const auto rep = contraction_curve(cfg, RngStream{59, 0});
  EXPECT_NEAR(rep.mass_outside_unconstrained[0], 0.033894853524689, 4 * rep.se_unconstrained[0]);
  // theta0 = 1 is interior and the posterior sd is 0.1, so projection is the identity.
  EXPECT_EQ(rep.mass_outside_unconstrained[0], rep.mass_outside_projected[0]);
}

TEST(ContractionCurve, LargeRadiusLeavesNoMass) {
  ContractionConfig cfg;
  cfg.big_m = 12.0;
  cfg.replicates = 20;
  cfg.samples = 500;
  const auto rep = contraction_curve(cfg, RngStream{60, 0});
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_LT(rep.mass_outside_unconstrained[k], 1e-3);
    EXPECT_LT(rep.mass_outside_projected[k], 1e-3);
  }
}

TEST(ContractionCurve, DirichletModelDominates) {
  ContractionConfig cfg;
  cfg.model = ContractionModel::dirichlet;
  cfg.theta0 = Vector{{0.3, 0.3, 0.4, 0.5, 0.3, 0.2}};
  cfg.rows = 2;
  cfg.cols = 3;
  cfg.n_values = {20, 200};
  cfg.replicates = 10;
  cfg.samples = 200;
  const auto rep = contraction_curve(cfg, RngStream{61, 0});
  EXPECT_EQ(rep.domination_violations, 0u);
}

TEST(ContractionCurve, WorkerCountDoesNotChangeResults) {
  ContractionConfig cfg;
  cfg.replicates = 16;
  cfg.samples = 300;
  const auto a = contraction_curve(cfg, RngStream{62, 0});
  cfg.workers = 3;
  const auto b = contraction_curve(cfg, RngStream{62, 0});
  EXPECT_EQ(a.replicate_unconstrained, b.replicate_unconstrained);
  EXPECT_EQ(a.replicate_projected, b.replicate_projected);
}
