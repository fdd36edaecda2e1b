#pragma once

// Posterior summaries and the empirical checks run against projected draws:
// equal-tailed intervals, autocorrelation, effective sample size, table fit,
// two-sample KS, and posterior contraction around a true parameter.

#include "postproj/constraint_set.hpp"
#include "postproj/errors.hpp"
#include "postproj/linalg.hpp"
#include "postproj/parallel.hpp"
#include "postproj/projection.hpp"
#include "postproj/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace postproj {

inline constexpr std::size_t kMinDraws = 100;

// Linear-interpolation quantile of sorted data (R type 7).
inline double sorted_quantile(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw InvalidInput("quantile: no data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct CredibleInterval {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
};

inline CredibleInterval credible_interval(std::span<const double> draws, double level) {
  if (draws.size() < kMinDraws) throw InvalidInput("credible_interval: needs at least 100 draws");
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("credible_interval: level must lie in (0, 1)");
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = 0.5 * (1.0 - level);
  return {sorted_quantile(sorted, tail), sorted_quantile(sorted, 1.0 - tail)};
}

inline double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double autocorrelation(std::span<const double> draws, std::size_t lag) {
  const double m = mean_of(draws);
  double denom = 0.0;
  for (double v : draws) denom += (v - m) * (v - m);
  if (!(denom > 0.0)) throw Degenerate("autocorrelation: zero variance");
  double num = 0.0;
  for (std::size_t t = 0; t + lag < draws.size(); ++t) num += (draws[t] - m) * (draws[t + lag] - m);
  return num / denom;
}

inline double lag1_autocorrelation(std::span<const double> draws) {
  if (draws.size() < kMinDraws) throw InvalidInput("lag1_autocorrelation: needs at least 100 draws");
  return autocorrelation(draws, 1);
}

// Geyer's initial positive sequence estimator.
inline double effective_sample_size(std::span<const double> draws) {
  const std::size_t n = draws.size();
  if (n < 4) throw InvalidInput("effective_sample_size: too few draws");
  const double m = mean_of(draws);
  double c0 = 0.0;
  for (double v : draws) c0 += (v - m) * (v - m);
  if (!(c0 > 0.0)) throw Degenerate("effective_sample_size: zero variance");
  auto rho = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) s += (draws[t] - m) * (draws[t + k] - m);
    return s / c0;
  };
  double tau = -1.0;  // running 2 * sum of pair sums, minus the lag-0 double count
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    const double pair = rho(k) + rho(k + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return static_cast<double>(n) / std::max(tau, 1.0 / static_cast<double>(n));
}

// (IJ)^{-1} sum |n_i+ theta_hat_ij - n_ij|.
inline double mad_fit(const Matrix& counts, const Matrix& theta_hat) {
  if (counts.rows() != theta_hat.rows() || counts.cols() != theta_hat.cols())
    throw ShapeError("mad_fit: table and fitted probabilities differ in shape");
  if (counts.size() == 0) throw ShapeError("mad_fit: empty table");
  const Vector row_totals = counts.rowwise().sum();
  const Matrix fitted = row_totals.asDiagonal() * theta_hat;
  return (fitted - counts).cwiseAbs().sum() / static_cast<double>(counts.size());
}

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("ks_statistic: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// Large-sample critical value c(alpha) sqrt((n + m) / (n m)).
inline double ks_critical_value(std::size_t n, std::size_t m, double alpha = 0.01) {
  const double c = std::sqrt(-0.5 * std::log(0.5 * alpha));
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  std::optional<double> atom_mass;  // fraction of draws sitting on a boundary point
  std::optional<double> lag1;       // empty for constant chains
  std::optional<double> ess;
};

struct ArmSummary {
  std::string name;
  std::vector<ParameterSummary> parameters;
  std::map<std::string, double> metrics;
};

struct SummaryReport {
  std::string command;
  std::vector<ArmSummary> arms;
  std::map<std::string, double> metrics;
  std::vector<std::string> warnings;
};

inline ParameterSummary summarize_column(std::string name, std::span<const double> draws, double level) {
  ParameterSummary s;
  s.name = std::move(name);
  s.mean = mean_of(draws);
  const auto ci = credible_interval(draws, level);
  s.ci_lower = ci.lower;
  s.ci_upper = ci.upper;
  try {
    s.lag1 = lag1_autocorrelation(draws);
    s.ess = effective_sample_size(draws);
  } catch (const Degenerate&) {
  }
  return s;
}

// One summary per column of `draws`.
inline std::vector<ParameterSummary> summarize_draws(const Matrix& draws, const std::vector<std::string>& names,
                                                     double level) {
  if (static_cast<std::size_t>(draws.cols()) != names.size()) throw ShapeError("summarize_draws: one name per column");
  std::vector<ParameterSummary> out;
  for (Eigen::Index j = 0; j < draws.cols(); ++j) {
    const Vector col = draws.col(j);
    out.push_back(summarize_column(names[static_cast<std::size_t>(j)], std::span<const double>(col.data(), col.size()),
                                   level));
  }
  return out;
}

inline double mean_interval_width(const std::vector<ParameterSummary>& ps) {
  double s = 0.0;
  for (const auto& p : ps) s += p.ci_upper - p.ci_lower;
  return ps.empty() ? 0.0 : s / static_cast<double>(ps.size());
}

enum class ContractionModel { gaussian, dirichlet };

struct ContractionConfig {
  ContractionModel model = ContractionModel::gaussian;
  // Gaussian: one coordinate. Dirichlet: the true table, row-major, rows x cols.
  Vector theta0 = Vector::Zero(1);
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> n_values{10, 100, 1000};
  double big_m = 3.0;
  std::size_t replicates = 200;
  std::size_t samples = 2000;  // posterior draws per replicate
  // Gaussian model: Normal(theta, data_var) data, Normal(prior_mean, prior_var)
  // prior, constraint [lower, upper].
  double data_var = 1.0;
  double prior_mean = 0.0;
  double prior_var = 1e3;
  double lower = 0.0;
  double upper = kInf;
  // Dirichlet model: symmetric Dirichlet(alpha) prior per row; n is the count per row.
  double alpha = 1.0;
  unsigned workers = 1;
};

struct ContractionReport {
  std::vector<std::size_t> n_values;
  std::vector<double> radii;                       // M n^{-1/2}
  std::vector<double> mass_outside_unconstrained;  // replicate means
  std::vector<double> mass_outside_projected;
  std::vector<double> se_unconstrained;            // standard errors of the replicate means
  std::vector<double> se_projected;
  std::vector<std::vector<double>> replicate_unconstrained;  // [n index][replicate]
  std::vector<std::vector<double>> replicate_projected;
  std::size_t domination_violations = 0;  // replicates with projected mass > unconstrained mass
};

namespace detail {

inline double mean_se(const std::vector<double>& v, double* mean) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  *mean = m;
  if (v.size() < 2) return 0.0;
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

struct ReplicateMasses {
  double unconstrained;
  double projected;
};

inline ReplicateMasses gaussian_replicate(const ContractionConfig& cfg, std::size_t n, double radius, Engine& eng) {
  const double theta0 = cfg.theta0[0];
  const auto data = sample_normal(theta0, std::sqrt(cfg.data_var), n, eng);
  const auto post = gaussian_conjugate_update(cfg.prior_mean, cfg.prior_var, cfg.data_var, data);
  const auto draws = sample_normal(post.theta_n, post.sigma_n(), cfg.samples, eng);
  std::size_t out_u = 0;
  std::size_t out_p = 0;
  for (double x : draws) {
    if (std::abs(x - theta0) > radius) ++out_u;
    if (std::abs(project_interval(x, cfg.lower, cfg.upper) - theta0) > radius) ++out_p;
  }
  const double L = static_cast<double>(cfg.samples);
  return {static_cast<double>(out_u) / L, static_cast<double>(out_p) / L};
}

inline ReplicateMasses dirichlet_replicate(const ContractionConfig& cfg, std::size_t n, double radius, Engine& eng) {
  const auto I = static_cast<Eigen::Index>(cfg.rows);
  const auto J = static_cast<Eigen::Index>(cfg.cols);
  const Matrix truth = Eigen::Map<const RowMatrix>(cfg.theta0.data(), I, J);
  Matrix post_alpha(I, J);
  for (Eigen::Index i = 0; i < I; ++i) {
    const auto counts = sample_multinomial(static_cast<long>(n), truth.row(i).transpose(), eng);
    for (Eigen::Index j = 0; j < J; ++j) post_alpha(i, j) = static_cast<double>(counts[static_cast<std::size_t>(j)]) + cfg.alpha;
  }
  std::size_t out_u = 0;
  std::size_t out_p = 0;
  for (std::size_t l = 0; l < cfg.samples; ++l) {
    Matrix draw(I, J);
    for (Eigen::Index i = 0; i < I; ++i) draw.row(i) = dirichlet_draw(post_alpha.row(i).transpose(), eng).transpose();
    const Matrix proj = project_ordered_table(draw);
    if ((draw - truth).norm() > radius) ++out_u;
    if ((proj - truth).norm() > radius) ++out_p;
  }
  const double L = static_cast<double>(cfg.samples);
  return {static_cast<double>(out_u) / L, static_cast<double>(out_p) / L};
}

}  // namespace detail

// Posterior mass outside the ball of radius M n^{-1/2} around theta0, before
// and after projection, averaged over simulated data sets. Replicate r at
// sample-size index k uses stream.child(k * replicates + r), so results do not
// depend on the worker count.
inline ContractionReport contraction_curve(const ContractionConfig& cfg, const RngStream& stream) {
  if (cfg.replicates == 0 || cfg.samples == 0 || cfg.n_values.empty())
    throw InvalidInput("contraction_curve: replicates, samples and n_values must be non-empty");
  ConstraintSet set;
  if (cfg.model == ContractionModel::gaussian) {
    if (cfg.theta0.size() != 1) throw ShapeError("contraction_curve: gaussian model takes a scalar theta0");
    set = Interval{cfg.lower, cfg.upper};
  } else {
    if (cfg.rows * cfg.cols != static_cast<std::size_t>(cfg.theta0.size()))
      throw ShapeError("contraction_curve: theta0 must hold rows * cols entries");
    set = OrderedTable{cfg.rows, cfg.cols};
  }
  validate(set);
  if (!contains(set, cfg.theta0, 1e-8)) throw InvalidInput("contraction_curve: theta0 must be feasible");

  ContractionReport rep;
  for (std::size_t k = 0; k < cfg.n_values.size(); ++k) {
    const std::size_t n = cfg.n_values[k];
    if (n == 0) throw InvalidInput("contraction_curve: n must be positive");
    const double radius = cfg.big_m / std::sqrt(static_cast<double>(n));
    std::vector<double> mu(cfg.replicates);
    std::vector<double> mp(cfg.replicates);
    parallel_for(cfg.replicates, cfg.workers, [&](std::size_t r) {
      Engine eng = stream.child(k * cfg.replicates + r).engine();
      const auto m = cfg.model == ContractionModel::gaussian ? detail::gaussian_replicate(cfg, n, radius, eng)
                                                             : detail::dirichlet_replicate(cfg, n, radius, eng);
      mu[r] = m.unconstrained;
      mp[r] = m.projected;
    });
    for (std::size_t r = 0; r < cfg.replicates; ++r)
      if (mp[r] > mu[r]) ++rep.domination_violations;
    double mean_u = 0.0;
    double mean_p = 0.0;
    rep.se_unconstrained.push_back(detail::mean_se(mu, &mean_u));
    rep.se_projected.push_back(detail::mean_se(mp, &mean_p));
    rep.n_values.push_back(n);
    rep.radii.push_back(radius);
    rep.mass_outside_unconstrained.push_back(mean_u);
    rep.mass_outside_projected.push_back(mean_p);
    rep.replicate_unconstrained.push_back(std::move(mu));
    rep.replicate_projected.push_back(std::move(mp));
  }
  return rep;
}

}  // namespace postproj
