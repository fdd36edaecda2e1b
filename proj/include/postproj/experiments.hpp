#pragma once

// End-to-end experiment drivers: the Gaussian interval demo, the ordered
// contingency table, the sphere demo and a Stiefel demo.

#include "postproj/analytic.hpp"
#include "postproj/constraint_set.hpp"
#include "postproj/diagnostics.hpp"
#include "postproj/errors.hpp"
#include "postproj/linalg.hpp"
#include "postproj/projection.hpp"
#include "postproj/samplers.hpp"
#include "postproj/stiefel.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace postproj {

inline std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// ---------------------------------------------------------------------------
// Gaussian mean constrained to an interval.

struct GaussianDemoConfig {
  std::vector<double> theta0s{-0.5, 0.0, 0.5};
  std::size_t n = 50;
  double data_var = 1.0;
  double prior_mean = 0.0;
  double prior_var = 1e3;
  double lower = 0.0;
  double upper = kInf;
  std::size_t samples = 10000;
  double level = 0.95;
  std::size_t grid_points = 401;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct NamedGrid {
  std::string label;  // e.g. "theta0=-0.5_posterior"
  DensityGrid grid;
};

struct GaussianDemoResult {
  SummaryReport report;
  std::vector<NamedGrid> grids;
};

inline GaussianDemoResult run_gaussian_demo(const GaussianDemoConfig& cfg) {
  if (cfg.theta0s.empty()) throw InvalidInput("gaussian-demo: at least one theta0 is required");
  if (cfg.n == 0) throw InvalidInput("gaussian-demo: n must be positive");
  if (cfg.samples < kMinDraws) throw InvalidInput("gaussian-demo: at least 100 samples are required");
  detail::check_bounds(cfg.lower, cfg.upper, "gaussian-demo");
  GaussianDemoResult out;
  out.report.command = "gaussian-demo";
  const RngStream root{cfg.seed, 0};
  const ConstraintSet set = Interval{cfg.lower, cfg.upper};
  for (std::size_t k = 0; k < cfg.theta0s.size(); ++k) {
    const double theta0 = cfg.theta0s[k];
    const std::string tag = "theta0=" + format_number(theta0);
    const RngStream s = root.child(k);
    const auto data = sample_normal(theta0, std::sqrt(cfg.data_var), cfg.n, s.child(0));
    const auto post = gaussian_conjugate_update(cfg.prior_mean, cfg.prior_var, cfg.data_var, data);
    const double xbar = mean_of(data);
    const auto mix = projected_gaussian_posterior(post, cfg.lower, cfg.upper);
    const auto prior = induced_prior_weights(cfg.lower, cfg.upper, xbar, cfg.data_var, static_cast<double>(cfg.n),
                                             cfg.prior_mean, cfg.prior_var, mix);

    const auto unconstrained = sample_normal(post.theta_n, post.sigma_n(), cfg.samples, s.child(1));
    SampleBatch batch{Eigen::Map<const Vector>(unconstrained.data(), static_cast<Eigen::Index>(unconstrained.size())),
                      cfg.seed, s.child(1).stream_id, tag};
    const SampleBatch projected = pushforward(batch, set, cfg.workers);
    std::vector<double> proj(projected.draws.data(), projected.draws.data() + projected.draws.size());

    // Independent batch for the truncated baseline, so the two arms share no draws.
    const auto baseline = sample_normal(post.theta_n, post.sigma_n(), cfg.samples, s.child(2));
    SampleBatch bbatch{Eigen::Map<const Vector>(baseline.data(), static_cast<Eigen::Index>(baseline.size())), cfg.seed,
                       s.child(2).stream_id, tag};
    const auto truncated = rejection_truncate(bbatch, set, 0.0);

    ArmSummary parm;
    parm.name = tag + ":projection";
    std::size_t at_lower = 0;
    std::size_t at_upper = 0;
    std::vector<double> interior;
    for (double x : proj) {
      if (x == cfg.lower) ++at_lower;
      else if (x == cfg.upper) ++at_upper;
      else interior.push_back(x);
    }
    auto ps = summarize_column("theta", proj, cfg.level);
    ps.atom_mass = static_cast<double>(at_lower + at_upper) / static_cast<double>(proj.size());
    parm.parameters.push_back(ps);
    parm.metrics["xbar"] = xbar;
    parm.metrics["theta_n"] = post.theta_n;
    parm.metrics["sigma_n"] = post.sigma_n();
    parm.metrics["atom_lower_analytic"] = mix.w_lower;
    parm.metrics["atom_upper_analytic"] = mix.w_upper;
    parm.metrics["atom_lower_mc"] = static_cast<double>(at_lower) / static_cast<double>(proj.size());
    parm.metrics["mean_analytic"] = projected_mixture_mean(mix);
    parm.metrics["prior_atom_lower"] = prior.w1;
    parm.metrics["prior_atom_upper"] = prior.w3;
    parm.metrics["prior_interior"] = prior.w2;

    ArmSummary tarm;
    tarm.name = tag + ":truncated";
    tarm.metrics["acceptance_rate"] = truncated.acceptance_rate;
    try {
      tarm.metrics["mean_analytic"] = truncated_posterior_mean(post, cfg.lower, cfg.upper);
    } catch (const Degenerate&) {
      out.report.warnings.push_back(tag + ": truncated posterior mean is numerically degenerate");
    }
    const std::vector<double> tdraws(truncated.batch.draws.data(),
                                     truncated.batch.draws.data() + truncated.batch.draws.size());
    if (tdraws.size() >= kMinDraws) {
      tarm.parameters.push_back(summarize_column("theta", tdraws, cfg.level));
      if (!interior.empty()) {
        const double ks = ks_statistic(interior, tdraws);
        parm.metrics["ks_interior_vs_truncated"] = ks;
        parm.metrics["ks_critical_1pct"] = ks_critical_value(interior.size(), tdraws.size());
      }
    } else {
      out.report.warnings.push_back(tag + ": truncated baseline kept fewer than 100 draws");
    }
    out.report.arms.push_back(std::move(parm));
    out.report.arms.push_back(std::move(tarm));

    const double hi_end = std::isfinite(cfg.upper)
                              ? cfg.upper
                              : std::max(cfg.lower, post.theta_n) + 6.0 * std::max(post.sigma_n(), 0.05);
    const double lo_end = std::isfinite(cfg.lower) ? cfg.lower : std::min(cfg.upper, post.theta_n) - 6.0 * post.sigma_n();
    const auto grid = linspace(lo_end, hi_end, cfg.grid_points);
    out.grids.push_back({tag + "_posterior", density_grid(mix, grid)});
    out.grids.push_back({tag + "_prior", density_grid(prior, grid)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stochastically ordered contingency table.

struct ContingencyConfig {
  double alpha = 1.0;
  std::size_t samples = 10000;
  double level = 0.95;
  std::uint64_t seed = 0;
  std::size_t max_proposal_rounds = 100;  // baseline proposals are capped at rounds * samples
  unsigned workers = 1;
};

inline std::vector<std::string> table_parameter_names(Eigen::Index rows, Eigen::Index cols) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) names.push_back("theta[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]");
  return names;
}

inline void validate_counts(const Matrix& counts) {
  if (counts.rows() < 2 || counts.cols() < 2) throw ShapeError("contingency: table must be at least 2 x 2");
  if (!counts.allFinite() || (counts.array() < 0.0).any()) throw InvalidInput("contingency: counts must be nonnegative");
  if ((counts.array() != counts.array().round()).any()) throw InvalidInput("contingency: counts must be integers");
  if ((counts.rowwise().sum().array() < 1.0).any()) throw InvalidInput("contingency: every row needs a count");
}

// Row-major Dirichlet(n_i + alpha) posterior draws, one table per row of the result.
inline Matrix sample_table_posterior(const Matrix& counts, double alpha, std::size_t n, Engine& eng) {
  const Eigen::Index I = counts.rows();
  const Eigen::Index J = counts.cols();
  Matrix out(static_cast<Eigen::Index>(n), I * J);
  for (Eigen::Index l = 0; l < out.rows(); ++l)
    for (Eigen::Index i = 0; i < I; ++i)
      out.row(l).segment(i * J, J) = dirichlet_draw((counts.row(i).array() + alpha).matrix().transpose(), eng).transpose();
  return out;
}

struct ContingencyResult {
  SummaryReport report;
  SampleBatch projected;
  SampleBatch truncated;  // may be empty
};

inline ContingencyResult run_contingency(const Matrix& counts, const ContingencyConfig& cfg) {
  validate_counts(counts);
  if (!(cfg.alpha > 0.0)) throw InvalidInput("contingency: alpha must be positive");
  if (cfg.samples < kMinDraws) throw InvalidInput("contingency: at least 100 samples are required");
  const Eigen::Index I = counts.rows();
  const Eigen::Index J = counts.cols();
  const ConstraintSet set = OrderedTable{static_cast<std::size_t>(I), static_cast<std::size_t>(J)};
  const auto names = table_parameter_names(I, J);
  const RngStream root{cfg.seed, 0};

  ContingencyResult res;
  res.report.command = "contingency";

  Engine eng = root.child(0).engine();
  const SampleBatch raw{sample_table_posterior(counts, cfg.alpha, cfg.samples, eng), cfg.seed, root.child(0).stream_id,
                        "unconstrained"};
  res.projected = pushforward(raw, set, cfg.workers);
  res.projected.label = "projection";

  // Truncated baseline: fresh proposals until `samples` are accepted or the cap is hit.
  Engine beng = root.child(1).engine();
  Matrix kept(0, I * J);
  std::size_t proposals = 0;
  for (std::size_t round = 0; round < cfg.max_proposal_rounds && static_cast<std::size_t>(kept.rows()) < cfg.samples;
       ++round) {
    const SampleBatch prop{sample_table_posterior(counts, cfg.alpha, cfg.samples, beng), cfg.seed,
                           root.child(1).stream_id, "proposal"};
    proposals += cfg.samples;
    const auto acc = rejection_truncate(prop, set, 0.0);
    const Eigen::Index take =
        std::min<Eigen::Index>(acc.batch.size(), static_cast<Eigen::Index>(cfg.samples) - kept.rows());
    Matrix grown(kept.rows() + take, I * J);
    grown << kept, acc.batch.draws.topRows(take);
    kept = std::move(grown);
  }
  res.truncated = SampleBatch{kept, cfg.seed, root.child(1).stream_id, "truncated"};
  const double acceptance = proposals ? static_cast<double>(kept.rows()) / static_cast<double>(proposals) : 0.0;

  auto posterior_mean_table = [&](const Matrix& draws) {
    const Vector m = draws.colwise().mean().transpose();
    return Matrix(Eigen::Map<const RowMatrix>(m.data(), I, J));
  };

  ArmSummary parm;
  parm.name = "projection";
  parm.parameters = summarize_draws(res.projected.draws, names, cfg.level);
  parm.metrics["mad"] = mad_fit(counts, posterior_mean_table(res.projected.draws));
  parm.metrics["mean_ci_width"] = mean_interval_width(parm.parameters);
  double max_lag1 = 0.0;
  for (const auto& p : parm.parameters)
    if (p.lag1) max_lag1 = std::max(max_lag1, std::abs(*p.lag1));
  parm.metrics["max_abs_lag1"] = max_lag1;
  parm.metrics["white_noise_band"] = 3.0 / std::sqrt(static_cast<double>(cfg.samples));
  res.report.arms.push_back(parm);

  res.report.metrics["acceptance_rate"] = acceptance;
  res.report.metrics["baseline_draws"] = static_cast<double>(kept.rows());
  if (kept.rows() == 0) {
    res.report.warnings.push_back("truncated baseline unavailable: no proposal satisfied the ordering constraints");
  } else {
    ArmSummary tarm;
    tarm.name = "truncated";
    tarm.metrics["mad"] = mad_fit(counts, posterior_mean_table(kept));
    if (static_cast<std::size_t>(kept.rows()) >= kMinDraws) {
      tarm.parameters = summarize_draws(kept, names, cfg.level);
      tarm.metrics["mean_ci_width"] = mean_interval_width(tarm.parameters);
    } else {
      res.report.warnings.push_back("truncated baseline kept fewer than 100 draws; intervals omitted");
    }
    if (static_cast<std::size_t>(kept.rows()) < cfg.samples)
      res.report.warnings.push_back("truncated baseline stopped at the proposal cap");
    res.report.arms.push_back(tarm);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Unit-sphere mean: projected Gaussian posterior against the conjugate vMF posterior.

struct SpherePrior {
  std::string name;
  Vector mu;
  double psi = 1.0;
};

struct SphereDemoConfig {
  Vector theta0 = Vector{{4.0, 2.0, 1.0}} / std::sqrt(21.0);
  std::size_t n = 100;
  double data_var = 10.0;
  std::vector<SpherePrior> priors{
      {"informative", Vector{{4.0, 2.0, 1.0}} / std::sqrt(21.0), 10.0},
      {"diffuse", Vector{{1.0, 1.0, 1.0}} / std::sqrt(3.0), 1.0},
  };
  std::size_t samples = 10000;
  double level = 0.95;
  std::uint64_t seed = 0;
};

inline double posterior_mse(const Matrix& draws, const Vector& truth) {
  return (draws.rowwise() - truth.transpose()).rowwise().squaredNorm().mean();
}

inline double max_relative_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / std::abs(b[i]));
  return worst;
}

// Arm "projection": Normal(mu, I / psi) prior, exact Gaussian posterior under
// Normal(theta, data_var I) data, draws normalised onto the sphere.
// Arm "vmf": vMF(mu, psi) prior updated with the resultant of x_i / data_var.
inline SummaryReport run_sphere_demo(const SphereDemoConfig& cfg) {
  const Eigen::Index m = cfg.theta0.size();
  if (m < 2) throw ShapeError("sphere-demo: dimension must be at least 2");
  if (std::abs(cfg.theta0.norm() - 1.0) > 1e-10) throw InvalidInput("sphere-demo: theta0 must be a unit vector");
  if (cfg.n == 0 || !(cfg.data_var > 0.0)) throw InvalidInput("sphere-demo: n and data_var must be positive");
  if (cfg.samples < kMinDraws) throw InvalidInput("sphere-demo: at least 100 samples are required");
  SummaryReport rep;
  rep.command = "sphere-demo";
  const RngStream root{cfg.seed, 0};

  Engine deng = root.child(0).engine();
  Matrix data(static_cast<Eigen::Index>(cfg.n), m);
  const double sd = std::sqrt(cfg.data_var);
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    for (Eigen::Index j = 0; j < m; ++j) data(i, j) = cfg.theta0[j] + sd * rng::standard_normal(deng);

  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < m; ++j) names.push_back("theta[" + std::to_string(j + 1) + "]");
  const ConstraintSet sphere = Sphere{static_cast<std::size_t>(m)};

  for (std::size_t k = 0; k < cfg.priors.size(); ++k) {
    const auto& prior = cfg.priors[k];
    if (prior.mu.size() != m) throw ShapeError("sphere-demo: prior mean has the wrong dimension");
    const double precision = prior.psi + static_cast<double>(cfg.n) / cfg.data_var;
    const Vector resultant = prior.psi * prior.mu + data.colwise().sum().transpose() / cfg.data_var;
    const Vector gmean = resultant / precision;

    Engine geng = root.child(10 + 2 * k).engine();
    Matrix gdraws(static_cast<Eigen::Index>(cfg.samples), m);
    const double gsd = 1.0 / std::sqrt(precision);
    for (Eigen::Index l = 0; l < gdraws.rows(); ++l)
      for (Eigen::Index j = 0; j < m; ++j) gdraws(l, j) = gmean[j] + gsd * rng::standard_normal(geng);
    const SampleBatch projected = pushforward(SampleBatch{gdraws, cfg.seed, root.child(10 + 2 * k).stream_id, prior.name}, sphere);

    const auto vpost = vmf_posterior_update(prior.mu, prior.psi, data / cfg.data_var);
    const Matrix vdraws = sample_vmf(vpost.mu_n, vpost.psi_n, cfg.samples, root.child(11 + 2 * k));

    ArmSummary a;
    a.name = prior.name + ":projection";
    a.parameters = summarize_draws(projected.draws, names, cfg.level);
    a.metrics["mse"] = posterior_mse(projected.draws, cfg.theta0);
    a.metrics["mean_ci_width"] = mean_interval_width(a.parameters);
    a.metrics["max_norm_error"] = (projected.draws.rowwise().norm().array() - 1.0).abs().maxCoeff();

    ArmSummary b;
    b.name = prior.name + ":vmf";
    b.parameters = summarize_draws(vdraws, names, cfg.level);
    b.metrics["mse"] = posterior_mse(vdraws, cfg.theta0);
    b.metrics["mean_ci_width"] = mean_interval_width(b.parameters);
    b.metrics["psi_n"] = vpost.psi_n;

    std::vector<double> wa, wb;
    for (std::size_t j = 0; j < a.parameters.size(); ++j) {
      wa.push_back(a.parameters[j].ci_upper - a.parameters[j].ci_lower);
      wb.push_back(b.parameters[j].ci_upper - b.parameters[j].ci_lower);
    }
    rep.metrics[prior.name + ":max_rel_ci_width_diff"] = max_relative_difference(wa, wb);
    rep.metrics[prior.name + ":rel_mse_diff"] = std::abs(a.metrics["mse"] - b.metrics["mse"]) / b.metrics["mse"];
    rep.arms.push_back(std::move(a));
    rep.arms.push_back(std::move(b));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Stiefel projection of noisy draws around a random orthonormal frame.

struct StiefelDemoConfig {
  std::size_t p = 2;
  std::size_t m = 3;
  double noise_sd = 0.3;
  std::size_t samples = 10000;
  double level = 0.95;
  std::uint64_t seed = 0;
};

inline SummaryReport run_stiefel_demo(const StiefelDemoConfig& cfg) {
  validate(Stiefel{cfg.p, cfg.m});
  if (cfg.samples < kMinDraws) throw InvalidInput("stiefel-demo: at least 100 samples are required");
  if (!(cfg.noise_sd > 0.0)) throw InvalidInput("stiefel-demo: noise_sd must be positive");
  const auto m = static_cast<Eigen::Index>(cfg.m);
  const auto p = static_cast<Eigen::Index>(cfg.p);
  SummaryReport rep;
  rep.command = "stiefel-demo";
  const RngStream root{cfg.seed, 0};
  Engine eng = root.child(0).engine();
  auto gaussian_matrix = [&](double scale) {
    Matrix g(m, p);
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index i = 0; i < m; ++i) g(i, j) = scale * rng::standard_normal(eng);
    return g;
  };
  const Matrix truth = project_stiefel(gaussian_matrix(1.0)).matrix;

  Matrix flat(static_cast<Eigen::Index>(cfg.samples), m * p);
  double max_ortho = 0.0;
  double max_scale_dev = 0.0;
  double max_lipschitz = 0.0;
  std::size_t rank_rejects = 0;
  for (Eigen::Index l = 0; l < flat.rows(); ++l) {
    const Matrix draw = truth + gaussian_matrix(cfg.noise_sd);
    Matrix proj;
    try {
      proj = project_stiefel(draw).matrix;
    } catch (const NonUniqueProjection&) {
      ++rank_rejects;
      proj = truth;
    }
    flat.row(l) = Eigen::Map<const Vector>(proj.data(), proj.size()).transpose();
    max_ortho = std::max(max_ortho, (proj.transpose() * proj - Matrix::Identity(p, p)).cwiseAbs().maxCoeff());
    max_scale_dev = std::max(max_scale_dev, (project_stiefel(7.0 * draw).matrix - proj).cwiseAbs().maxCoeff());
    const double base = (draw - truth).norm();
    if (base > 0.0) max_lipschitz = std::max(max_lipschitz, (proj - truth).norm() / base);
  }
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < m; ++i) names.push_back("theta[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]");

  ArmSummary arm;
  arm.name = "projection";
  arm.parameters = summarize_draws(flat, names, cfg.level);
  arm.metrics["max_orthonormality_error"] = max_ortho;
  arm.metrics["max_scale_invariance_deviation"] = max_scale_dev;
  arm.metrics["max_distance_ratio_to_truth"] = max_lipschitz;
  arm.metrics["rank_guard_rejections"] = static_cast<double>(rank_rejects);
  arm.metrics["posterior_mse"] = posterior_mse(flat, Eigen::Map<const Vector>(truth.data(), truth.size()));
  rep.arms.push_back(arm);

  // The 2 x 2 example where projection increases a distance.
  const Matrix t1 = Matrix::Identity(2, 2);
  const Matrix t2 = (Matrix(2, 2) << 0, 1, 1, 0).finished();
  const Matrix t3 = (Matrix(2, 2) << 0.25, 0.75, 0.75, 0.25).finished();
  rep.metrics["counterexample_projected_distance"] = (project_stiefel(t3).matrix - project_stiefel(t1).matrix).norm();
  rep.metrics["counterexample_original_distance"] = (t3 - t1).norm();
  return rep;
}

}  // namespace postproj
