#pragma once

// Closed forms for a Gaussian posterior pushed onto an interval [c, d]: point
// masses at the ends plus a truncated normal inside, the induced prior that
// reproduces it by Bayes' rule, and tabulated densities.

#include "postproj/errors.hpp"
#include "postproj/linalg.hpp"
#include "postproj/normal.hpp"
#include "postproj/samplers.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace postproj {

struct ProjectedGaussianMixture {
  double w_lower = 0.0;     // mass at c
  double w_interior = 1.0;  // mass of (c, d)
  double w_upper = 0.0;     // mass at d
  double c = -kInf;
  double d = kInf;
  double theta_n = 0.0;
  double sigma_n = 1.0;
};

// w1 at c, w2 * Normal_[c,d](theta0, sigma0_2) inside, w3 at d. Densities are
// with respect to Lebesgue measure inside plus unit point masses at c and d.
struct BoundaryPrior {
  double w1 = 0.0;
  double w2 = 1.0;
  double w3 = 0.0;
  double c = -kInf;
  double d = kInf;
  double theta0 = 0.0;
  double sigma0_2 = 1.0;
};

namespace detail {

inline void check_bounds(double c, double d, const char* who) {
  if (std::isnan(c) || std::isnan(d) || !(c < d)) throw InvalidInput(std::string(who) + ": requires c < d");
}

struct TailWeights {
  double lower;
  double interior;
  double upper;
};

inline TailWeights tail_weights(double theta, double sigma, double c, double d) {
  const double alpha = (c - theta) / sigma;
  const double beta = (d - theta) / sigma;
  return {normal::cdf(alpha), normal::interval_mass(alpha, beta), normal::cdf(-beta)};
}

// (phi(alpha) - phi(beta)) / (Phi(beta) - Phi(alpha)), evaluated in log space.
inline double truncation_shift(double alpha, double beta) {
  const double log_mass = normal::log_interval_mass(alpha, beta);
  const double pa = std::isinf(alpha) ? 0.0 : std::exp(normal::log_pdf(alpha) - log_mass);
  const double pb = std::isinf(beta) ? 0.0 : std::exp(normal::log_pdf(beta) - log_mass);
  return pa - pb;
}

}  // namespace detail

inline ProjectedGaussianMixture projected_gaussian_posterior(const GaussianPosterior& post, double c, double d) {
  detail::check_bounds(c, d, "projected_gaussian_posterior");
  if (!(post.sigma_n2 > 0.0)) throw InvalidInput("projected_gaussian_posterior: sigma_n2 must be positive");
  const double sigma = post.sigma_n();
  const auto w = detail::tail_weights(post.theta_n, sigma, c, d);
  return ProjectedGaussianMixture{w.lower, w.interior, w.upper, c, d, post.theta_n, sigma};
}

// c Phi(alpha) + (Phi(beta) - Phi(alpha)) theta_n + sigma_n (phi(alpha) - phi(beta)) + d Phi(-beta);
// infinite ends contribute nothing.
inline double projected_mixture_mean(const ProjectedGaussianMixture& mix) {
  const double alpha = (mix.c - mix.theta_n) / mix.sigma_n;
  const double beta = (mix.d - mix.theta_n) / mix.sigma_n;
  double mean = mix.w_interior * mix.theta_n + mix.sigma_n * (normal::pdf(alpha) - normal::pdf(beta));
  if (std::isfinite(mix.c)) mean += mix.c * mix.w_lower;
  if (std::isfinite(mix.d)) mean += mix.d * mix.w_upper;
  return mean;
}

// Mean of the posterior truncated to [c, d].
inline double truncated_posterior_mean(const GaussianPosterior& post, double c, double d) {
  detail::check_bounds(c, d, "truncated_posterior_mean");
  const double sigma = post.sigma_n();
  const double alpha = (c - post.theta_n) / sigma;
  const double beta = (d - post.theta_n) / sigma;
  if (alpha > 38.0 || beta < -38.0)
    throw Degenerate("truncated_posterior_mean: interval lies beyond 38 standard deviations");
  return post.theta_n + sigma * detail::truncation_shift(alpha, beta);
}

// Log of the likelihood integrals C_j against each prior component, in the
// order (atom at c, interior, atom at d). The likelihood of theta is the
// sampling density of xbar, Normal(xbar; theta, sigma2 / n).
inline std::array<double, 3> log_boundary_constants(double c, double d, double xbar, double sigma2, double n,
                                                     double theta0, double sigma0_2) {
  const double v = sigma2 / n;
  const double ninf = -std::numeric_limits<double>::infinity();
  std::array<double, 3> out{ninf, ninf, ninf};
  if (std::isfinite(c)) out[0] = normal::log_pdf(c, xbar, v);
  if (std::isfinite(d)) out[2] = normal::log_pdf(d, xbar, v);
  // Normal(theta; theta0, s0) * Normal(xbar; theta, v) = Normal(xbar; theta0, s0 + v) * Normal(theta; theta_n, s_n),
  // so integrating the truncated prior leaves the ratio of truncation masses.
  const double sn2 = 1.0 / (1.0 / sigma0_2 + 1.0 / v);
  const double thn = sn2 * (theta0 / sigma0_2 + xbar / v);
  const double s0 = std::sqrt(sigma0_2);
  const double sn = std::sqrt(sn2);
  out[1] = normal::log_pdf(xbar, theta0, sigma0_2 + v) +
           normal::log_interval_mass((c - thn) / sn, (d - thn) / sn) -
           normal::log_interval_mass((c - theta0) / s0, (d - theta0) / s0);
  return out;
}

inline std::array<double, 3> boundary_constants(double c, double d, double xbar, double sigma2, double n,
                                                double theta0, double sigma0_2) {
  const auto l = log_boundary_constants(c, d, xbar, sigma2, n, theta0, sigma0_2);
  return {std::exp(l[0]), std::exp(l[1]), std::exp(l[2])};
}

namespace detail {

// Normalises exp(logs) over the finite entries.
inline std::array<double, 3> normalise_logs(const std::array<double, 3>& logs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double l : logs) mx = std::max(mx, l);
  std::array<double, 3> w{};
  if (!std::isfinite(mx)) throw Degenerate("normalise: all weights vanish");
  double total = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    w[j] = std::isfinite(logs[j]) ? std::exp(logs[j] - mx) : 0.0;
    total += w[j];
  }
  for (auto& x : w) x /= total;
  return w;
}

inline double safe_log(double x) { return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity(); }

}  // namespace detail

// Prior weights that a Bayes update under the Gaussian likelihood maps onto the
// target's weights: w_j proportional to W_j / C_j.
inline BoundaryPrior induced_prior_weights(double c, double d, double xbar, double sigma2, double n, double theta0,
                                           double sigma0_2, const ProjectedGaussianMixture& target) {
  detail::check_bounds(c, d, "induced_prior_weights");
  if (!(sigma2 > 0.0) || !(sigma0_2 > 0.0) || !(n > 0.0))
    throw InvalidInput("induced_prior_weights: variances and n must be positive");
  const auto logc = log_boundary_constants(c, d, xbar, sigma2, n, theta0, sigma0_2);
  const std::array<double, 3> target_w{target.w_lower, target.w_interior, target.w_upper};
  std::array<double, 3> logs{};
  for (std::size_t j = 0; j < 3; ++j) {
    const double lw = detail::safe_log(target_w[j]);
    if (!std::isfinite(lw)) {
      logs[j] = lw;
      continue;
    }
    if (!std::isfinite(logc[j])) throw Degenerate("induced_prior_weights: C_j = 0 for a target weight > 0");
    logs[j] = lw - logc[j];
  }
  const auto w = detail::normalise_logs(logs);
  return BoundaryPrior{w[0], w[1], w[2], c, d, theta0, sigma0_2};
}

// Posterior of a BoundaryPrior under n observations with mean xbar and known
// variance sigma2.
inline ProjectedGaussianMixture bayes_update(const BoundaryPrior& prior, double xbar, double sigma2, double n) {
  const auto logc = log_boundary_constants(prior.c, prior.d, xbar, sigma2, n, prior.theta0, prior.sigma0_2);
  const std::array<double, 3> pw{prior.w1, prior.w2, prior.w3};
  std::array<double, 3> logs{};
  for (std::size_t j = 0; j < 3; ++j) logs[j] = detail::safe_log(pw[j]) + logc[j];
  const auto w = detail::normalise_logs(logs);
  const double v = sigma2 / n;
  const double sn2 = 1.0 / (1.0 / prior.sigma0_2 + 1.0 / v);
  const double thn = sn2 * (prior.theta0 / prior.sigma0_2 + xbar / v);
  return ProjectedGaussianMixture{w[0], w[1], w[2], prior.c, prior.d, thn, std::sqrt(sn2)};
}

// One row per grid point; atom masses are repeated on every row and never
// folded into the density column.
struct DensityGrid {
  std::vector<double> point;
  std::vector<double> density;
  double atom_c_mass = 0.0;
  double atom_d_mass = 0.0;
};

namespace detail {

inline DensityGrid tabulate(double w_interior, double mean, double sd, double c, double d, double atom_c,
                            double atom_d, std::span<const double> grid) {
  DensityGrid out;
  out.atom_c_mass = atom_c;
  out.atom_d_mass = atom_d;
  const double log_mass = normal::log_interval_mass((c - mean) / sd, (d - mean) / sd);
  double prev = -kInf;
  for (double x : grid) {
    if (x < prev) throw InvalidInput("density_grid: grid must be sorted");
    if (x < c || x > d) throw InvalidInput("density_grid: grid point outside [c, d]");
    prev = x;
    out.point.push_back(x);
    out.density.push_back(w_interior > 0.0
                              ? w_interior * std::exp(normal::log_pdf((x - mean) / sd) - std::log(sd) - log_mass)
                              : 0.0);
  }
  return out;
}

}  // namespace detail

inline DensityGrid density_grid(const ProjectedGaussianMixture& mix, std::span<const double> grid) {
  return detail::tabulate(mix.w_interior, mix.theta_n, mix.sigma_n, mix.c, mix.d, mix.w_lower, mix.w_upper, grid);
}

inline DensityGrid density_grid(const BoundaryPrior& prior, std::span<const double> grid) {
  return detail::tabulate(prior.w2, prior.theta0, std::sqrt(prior.sigma0_2), prior.c, prior.d, prior.w1, prior.w3,
                          grid);
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = hi;
  return out;
}

}  // namespace postproj
