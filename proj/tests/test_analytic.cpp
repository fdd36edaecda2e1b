#include "oracles.hpp"
#include "postproj/analytic.hpp"
#include "postproj/projection.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace postproj;

namespace {

constexpr double kPhiMinus10 = 7.6198530241605e-24;
constexpr double kPhiMinus1 = 0.158655253931457;
constexpr double kPhi0 = 0.398942280401433;
constexpr double kSqrt2OverPi = 0.797884560802865;

}  // namespace

TEST(Normal, CdfAndDensityAgainstQuadrature) {
  for (double z : {-6.0, -2.5, -1.0, 0.0, 0.7, 3.0}) EXPECT_NEAR(normal::cdf(z), oracle::Phi(z), 1e-14);
  EXPECT_NEAR(normal::pdf(0.0), kPhi0, 1e-15);
  EXPECT_NEAR(normal::cdf(-10.0) / kPhiMinus10, 1.0, 1e-12);
  EXPECT_NEAR(std::exp(normal::log_cdf(-10.0)) / kPhiMinus10, 1.0, 1e-12);
  // Beyond the double range of Phi itself; values from 30-digit arithmetic.
  EXPECT_NEAR(normal::log_cdf(-40.0), -804.608442013753788, 1e-12);
  EXPECT_NEAR(normal::log_cdf(-30.5), -469.462737322912114, 1e-12);
  EXPECT_NEAR(normal::log_cdf(-29.5), -439.429474609150228, 1e-12);
  EXPECT_NEAR(normal::quantile(0.975), 1.959963984540054, 1e-13);
}

TEST(Normal, IntervalMassIsAccurateInTheTails) {
  EXPECT_NEAR(normal::interval_mass(-1.0, 1.0), 1.0 - 2.0 * kPhiMinus1, 1e-14);
  const double far = normal::interval_mass(9.0, 10.0);
  EXPECT_NEAR(far / oracle::integrate(oracle::phi, 9.0, 10.0), 1.0, 1e-10);
  EXPECT_NEAR(std::exp(normal::log_interval_mass(30.0, kInf) - normal::log_cdf(-30.0)), 1.0, 1e-12);
}

TEST(ProjectedGaussianPosterior, Weights) {
  const auto a = projected_gaussian_posterior({0.0, 1.0}, 0.0, kInf);
  EXPECT_DOUBLE_EQ(a.w_lower, 0.5);
  EXPECT_DOUBLE_EQ(a.w_upper, 0.0);
  const auto b = projected_gaussian_posterior({10.0, 1.0}, 0.0, kInf);
  EXPECT_NEAR(b.w_lower / kPhiMinus10, 1.0, 1e-12);
  const auto c = projected_gaussian_posterior({0.0, 1.0}, -1.0, 1.0);
  EXPECT_NEAR(c.w_lower, kPhiMinus1, 1e-14);
  EXPECT_NEAR(c.w_upper, kPhiMinus1, 1e-14);
  EXPECT_NEAR(c.w_lower + c.w_interior + c.w_upper, 1.0, 1e-12);
  EXPECT_THROW(projected_gaussian_posterior({0.0, 1.0}, 1.0, 0.0), InvalidInput);
}

TEST(ProjectedGaussianPosterior, WeightsMatchPushforward) {
  const GaussianPosterior post{0.4, 0.81};
  const auto mix = projected_gaussian_posterior(post, 0.0, 1.0);
  const std::size_t L = 1000000;
  const auto x = sample_normal(post.theta_n, post.sigma_n(), L, RngStream{40, 0});
  const auto out = pushforward(SampleBatch{Eigen::Map<const Vector>(x.data(), L), 0, 0, ""}, Interval{0.0, 1.0});
  const double lo = (out.draws.array() == 0.0).cast<double>().mean();
  const double hi = (out.draws.array() == 1.0).cast<double>().mean();
  EXPECT_NEAR(lo, mix.w_lower, 4 * std::sqrt(mix.w_lower * (1 - mix.w_lower) / L));
  EXPECT_NEAR(hi, mix.w_upper, 4 * std::sqrt(mix.w_upper * (1 - mix.w_upper) / L));
  const double sd = std::sqrt((out.draws.array() - out.draws.mean()).square().mean());
  EXPECT_NEAR(out.draws.mean(), projected_mixture_mean(mix), 4 * sd / std::sqrt(static_cast<double>(L)));
}

TEST(ProjectedMixtureMean, Examples) {
  EXPECT_NEAR(projected_mixture_mean(projected_gaussian_posterior({0.0, 1.0}, 0.0, kInf)), kPhi0, 1e-15);
  EXPECT_NEAR(projected_mixture_mean(projected_gaussian_posterior({0.0, 1.0}, -1.0, 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(projected_mixture_mean(projected_gaussian_posterior({0.3, 1e-12}, 0.0, 1.0)), 0.3, 1e-12);
}

TEST(ProjectedMixtureMean, MatchesQuadrature) {
  const double th = -0.4, s = 1.3, c = -1.0, d = 0.5;
  const auto mix = projected_gaussian_posterior({th, s * s}, c, d);
  const double inner = oracle::integrate([&](double t) { return t * oracle::phi((t - th) / s) / s; }, c, d);
  const double expected = c * oracle::Phi((c - th) / s) + inner + d * oracle::Phi(-(d - th) / s);
  EXPECT_NEAR(projected_mixture_mean(mix), expected, 1e-12);
}

TEST(TruncatedPosteriorMean, Examples) {
  EXPECT_NEAR(truncated_posterior_mean({0.0, 1.0}, 0.0, kInf), kSqrt2OverPi, 1e-15);
  EXPECT_NEAR(truncated_posterior_mean({0.0, 1.0}, -1.0, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(truncated_posterior_mean({0.0, 1.0}, 8.0, kInf), 8.12136811223611, 1e-12);
  EXPECT_THROW(truncated_posterior_mean({0.0, 1.0}, 40.0, kInf), Degenerate);
  EXPECT_THROW(truncated_posterior_mean({0.0, 1.0}, -kInf, -40.0), Degenerate);
}

TEST(TruncatedPosteriorMean, ProjectedMeanIsCloserForNonpositiveCentres) {
  for (double th = -3.0; th <= 0.0; th += 0.05) {
    const GaussianPosterior post{th, 1.0};
    const double pm = projected_mixture_mean(projected_gaussian_posterior(post, 0.0, kInf));
    const double tm = truncated_posterior_mean(post, 0.0, kInf);
    EXPECT_GE(pm, th);
    EXPECT_LE(pm, tm);
  }
  EXPECT_LT(std::abs(kPhi0 - 0.0), std::abs(kSqrt2OverPi - 0.0));
}

TEST(BoundaryConstants, AtomAtTheMeanIsTheDensityPeak) {
  const auto C = boundary_constants(0.0, kInf, 0.0, 1.0, 1.0, 0.0, 1.0);
  EXPECT_NEAR(C[0], kPhi0, 1e-15);
  EXPECT_EQ(C[2], 0.0);
}

TEST(BoundaryConstants, InteriorConstantMatchesQuadrature) {
  // int_c^d Normal_[c,d](t; theta0, s0^2) Normal(xbar; t, v) dt
  const double c = -0.5, d = 1.2, xbar = 0.3, sigma2 = 2.0, n = 7.0, th0 = 0.8, s02 = 0.6;
  const double v = sigma2 / n;
  const double s0 = std::sqrt(s02);
  const double mass = oracle::Phi((d - th0) / s0) - oracle::Phi((c - th0) / s0);
  const double expected = oracle::integrate(
      [&](double t) { return oracle::phi((t - th0) / s0) / s0 / mass * oracle::phi((xbar - t) / std::sqrt(v)) / std::sqrt(v); },
      c, d);
  const auto C = boundary_constants(c, d, xbar, sigma2, n, th0, s02);
  EXPECT_NEAR(C[1] / expected, 1.0, 1e-12);
  EXPECT_NEAR(C[0], oracle::phi((c - xbar) / std::sqrt(v)) / std::sqrt(v), 1e-14);
  EXPECT_NEAR(C[2], oracle::phi((d - xbar) / std::sqrt(v)) / std::sqrt(v), 1e-14);
}

TEST(InducedPrior, SymmetricSetupHasEqualAtoms) {
  const auto target = projected_gaussian_posterior({0.0, 0.2}, -1.0, 1.0);
  const auto prior = induced_prior_weights(-1.0, 1.0, 0.0, 1.0, 5.0, 0.0, 1.0, target);
  EXPECT_NEAR(prior.w1, prior.w3, 1e-15);
  EXPECT_NEAR(prior.w1 + prior.w2 + prior.w3, 1.0, 1e-15);
}

TEST(InducedPrior, RoundTripReproducesTarget) {
  std::mt19937_64 eng(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> nd(1, 200);
  for (int trial = 0; trial < 50; ++trial) {
    const double c = u(eng);
    const double d = trial % 5 == 0 ? kInf : c + 0.2 + std::abs(u(eng));
    const double xbar = u(eng), n = nd(eng), sigma2 = 1.0, th0 = 0.0, s02 = 1e3;
    const double v = sigma2 / n;
    const double sn2 = 1.0 / (1.0 / s02 + 1.0 / v);
    const GaussianPosterior post{sn2 * (th0 / s02 + xbar / v), sn2};
    const auto target = projected_gaussian_posterior(post, c, d);
    const auto prior = induced_prior_weights(c, d, xbar, sigma2, n, th0, s02, target);
    const auto back = bayes_update(prior, xbar, sigma2, n);
    EXPECT_NEAR(back.w_lower, target.w_lower, 1e-10) << trial;
    EXPECT_NEAR(back.w_interior, target.w_interior, 1e-10) << trial;
    EXPECT_NEAR(back.w_upper, target.w_upper, 1e-10) << trial;
    const double hi = std::isfinite(d) ? d : std::max(c, post.theta_n) + 6 * post.sigma_n();
    const auto grid = linspace(c, hi, 201);
    const auto g1 = density_grid(target, grid);
    const auto g2 = density_grid(back, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(g1.density[i], g2.density[i], 1e-8) << trial;
  }
}

TEST(InducedPrior, ImpossibleTargetIsDegenerate) {
  // An atom at an infinite end has C = 0.
  ProjectedGaussianMixture target{0.0, 0.5, 0.5, 0.0, kInf, 1.0, 1.0};
  EXPECT_THROW(induced_prior_weights(0.0, kInf, 1.0, 1.0, 10.0, 0.0, 1.0, target), Degenerate);
}

TEST(DensityGrid, TotalMassIsOne) {
  const auto mix = projected_gaussian_posterior({0.2, 0.5}, -0.5, 1.0);
  const auto grid = linspace(-0.5, 1.0, 10000);
  const auto g = density_grid(mix, grid);
  double area = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) area += 0.5 * (g.density[i] + g.density[i - 1]) * (grid[i] - grid[i - 1]);
  EXPECT_NEAR(area + g.atom_c_mass + g.atom_d_mass, 1.0, 1e-3);
}

TEST(DensityGrid, ZeroInteriorAndValidation) {
  const ProjectedGaussianMixture mix{1.0, 0.0, 0.0, 0.0, 1.0, -50.0, 1.0};
  const auto g = density_grid(mix, linspace(0.0, 1.0, 11));
  for (double x : g.density) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(g.atom_c_mass, 1.0);
  const std::vector<double> unsorted{0.5, 0.2};
  EXPECT_THROW(density_grid(mix, unsorted), InvalidInput);
  const std::vector<double> outside{-0.1, 0.2};
  EXPECT_THROW(density_grid(mix, outside), InvalidInput);
}

TEST(DensityGrid, CentredDataGiveAnAtomNearHalf) {
  // n = 50, prior Normal(0, 1e3), theta0 = 0: over data realisations the atom
  // mass Phi(-theta_n / sigma_n) is uniform on (0, 1), so its average is 1/2.
  const std::size_t reps = 4000;
  double total = 0.0;
  Engine eng(42);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto data = sample_normal(0.0, 1.0, 50, eng);
    const auto post = gaussian_conjugate_update(0.0, 1e3, 1.0, data);
    total += projected_gaussian_posterior(post, 0.0, kInf).w_lower;
  }
  EXPECT_NEAR(total / reps, 0.5, 4 * std::sqrt(1.0 / 12.0 / reps));
}

TEST(Linspace, Endpoints) {
  const auto g = linspace(-1.0, 2.0, 4);
  EXPECT_EQ(g.front(), -1.0);
  EXPECT_EQ(g.back(), 2.0);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
}
