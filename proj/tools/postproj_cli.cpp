// postproj: command-line driver for the projected-posterior experiments.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include "postproj/postproj.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using postproj::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240601;

struct CommonOptions {
  std::uint64_t seed = kDefaultSeed;
  std::size_t samples = 10000;
  double level = 0.95;
  std::string out;
  unsigned workers = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o, std::size_t default_samples) {
  o.samples = default_samples;
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--samples", o.samples, "Posterior draws (at least 100)")
      ->check(CLI::Range(std::size_t{100}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  cmd->add_option("--level", o.level, "Credible-interval level in (0.5, 1)")
      ->check(CLI::Range(0.5, 1.0))
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output JSON path (default <command>.json)");
  cmd->add_option("--workers", o.workers, "Worker threads; results do not depend on this")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
}

fs::path out_path(const CommonOptions& o, const std::string& command) {
  return o.out.empty() ? fs::path(command + ".json") : fs::path(o.out);
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (c == '=') c = '_';
  return s;
}

json common_config(const CommonOptions& o) {
  return json{{"samples", o.samples}, {"level", o.level}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inference under constraints by projecting posterior draws"};
  app.require_subcommand(1);

  CommonOptions gopt, copt, sopt, topt, kopt;

  // gaussian-demo
  auto* gauss = app.add_subcommand("gaussian-demo", "Gaussian mean projected onto [c, d]; writes density grids");
  add_common(gauss, gopt, 10000);
  std::vector<double> g_theta0{-0.5, 0.0, 0.5};
  std::size_t g_n = 50;
  double g_lower = 0.0;
  std::optional<double> g_upper;
  gauss->add_option("--theta0", g_theta0, "True mean (repeatable)")->capture_default_str();
  gauss->add_option("--n", g_n, "Observations per data set")->check(CLI::PositiveNumber)->capture_default_str();
  gauss->add_option("--lower", g_lower, "Lower bound c")->capture_default_str();
  gauss->add_option("--upper", g_upper, "Upper bound d (default +inf)");

  // contingency
  auto* cont = app.add_subcommand("contingency", "Stochastically ordered contingency table");
  add_common(cont, copt, 10000);
  std::string c_input;
  double c_alpha = 1.0;
  cont->add_option("--input", c_input, "CSV of counts (optional header row)")->required()->check(CLI::ExistingFile);
  cont->add_option("--alpha", c_alpha, "Dirichlet prior parameter")->check(CLI::PositiveNumber)->capture_default_str();

  // sphere-demo
  auto* sph = app.add_subcommand("sphere-demo", "Unit-sphere mean: projection vs. von Mises-Fisher");
  add_common(sph, sopt, 10000);

  // stiefel-demo
  auto* stf = app.add_subcommand("stiefel-demo", "Projection of noisy matrices onto St(p, m)");
  add_common(stf, topt, 10000);
  std::size_t t_p = 2, t_m = 3;
  double t_noise = 0.3;
  stf->add_option("--p", t_p, "Frame size p")->check(CLI::PositiveNumber)->capture_default_str();
  stf->add_option("--m", t_m, "Ambient dimension m")->check(CLI::PositiveNumber)->capture_default_str();
  stf->add_option("--noise", t_noise, "Entrywise noise sd")->check(CLI::PositiveNumber)->capture_default_str();

  // contraction
  auto* con = app.add_subcommand("contraction", "Posterior mass outside shrinking balls, with and without projection");
  add_common(con, kopt, 2000);
  std::string k_model = "gaussian";
  std::vector<double> k_theta0;
  std::vector<std::size_t> k_n{10, 100, 1000};
  double k_big_m = 3.0;
  std::size_t k_reps = 200, k_cols = 0;
  con->add_option("--model", k_model, "gaussian or dirichlet")
      ->check(CLI::IsMember({"gaussian", "dirichlet"}))
      ->capture_default_str();
  con->add_option("--theta0", k_theta0, "True parameter; row-major table entries for dirichlet (repeatable)");
  con->add_option("--cols", k_cols, "Columns of the true table (dirichlet)");
  con->add_option("--n", k_n, "Sample sizes (repeatable)")->capture_default_str();
  con->add_option("--big-m", k_big_m, "Ball radius multiplier M")->check(CLI::PositiveNumber)->capture_default_str();
  con->add_option("--replicates", k_reps, "Simulated data sets per n")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (gauss->parsed()) {
      postproj::GaussianDemoConfig cfg;
      cfg.theta0s = g_theta0;
      cfg.n = g_n;
      cfg.lower = g_lower;
      cfg.upper = g_upper.value_or(postproj::kInf);
      cfg.samples = gopt.samples;
      cfg.level = gopt.level;
      cfg.seed = gopt.seed;
      cfg.workers = gopt.workers;
      const auto res = postproj::run_gaussian_demo(cfg);
      const fs::path path = out_path(gopt, "gaussian-demo");
      json grids = json::object();
      for (const auto& g : res.grids) {
        fs::path csv = path;
        csv.replace_filename(path.stem().string() + "_" + sanitize(g.label) + ".csv");
        postproj::write_density_grid(g.grid, csv);
        grids[g.label] = csv.filename().string();
      }
      json config = common_config(gopt);
      config["theta0"] = g_theta0;
      config["n"] = g_n;
      config["lower"] = g_lower;
      config["upper"] = g_upper ? json(*g_upper) : json("inf");
      config["data_var"] = cfg.data_var;
      config["prior_mean"] = cfg.prior_mean;
      config["prior_var"] = cfg.prior_var;
      json results = postproj::summary_to_json(res.report);
      results["grids"] = grids;
      postproj::emit_report(postproj::make_document("gaussian-demo", gopt.seed, config, results), path);
    } else if (cont->parsed()) {
      const postproj::Matrix counts = postproj::parse_contingency_csv(c_input);
      postproj::ContingencyConfig cfg;
      cfg.alpha = c_alpha;
      cfg.samples = copt.samples;
      cfg.level = copt.level;
      cfg.seed = copt.seed;
      cfg.workers = copt.workers;
      const auto res = postproj::run_contingency(counts, cfg);
      json config = common_config(copt);
      config["input"] = fs::path(c_input).filename().string();
      config["alpha"] = c_alpha;
      config["rows"] = counts.rows();
      config["cols"] = counts.cols();
      postproj::emit_report(
          postproj::make_document("contingency", copt.seed, config, postproj::summary_to_json(res.report)),
          out_path(copt, "contingency"));
      for (const auto& w : res.report.warnings) std::cerr << "warning: " << w << "\n";
    } else if (sph->parsed()) {
      postproj::SphereDemoConfig cfg;
      cfg.samples = sopt.samples;
      cfg.level = sopt.level;
      cfg.seed = sopt.seed;
      const auto rep = postproj::run_sphere_demo(cfg);
      json config = common_config(sopt);
      config["theta0"] = std::vector<double>(cfg.theta0.data(), cfg.theta0.data() + cfg.theta0.size());
      config["n"] = cfg.n;
      config["data_var"] = cfg.data_var;
      postproj::emit_report(postproj::make_document("sphere-demo", sopt.seed, config, postproj::summary_to_json(rep)),
                            out_path(sopt, "sphere-demo"));
    } else if (stf->parsed()) {
      postproj::StiefelDemoConfig cfg;
      cfg.p = t_p;
      cfg.m = t_m;
      cfg.noise_sd = t_noise;
      cfg.samples = topt.samples;
      cfg.level = topt.level;
      cfg.seed = topt.seed;
      const auto rep = postproj::run_stiefel_demo(cfg);
      json config = common_config(topt);
      config["p"] = t_p;
      config["m"] = t_m;
      config["noise_sd"] = t_noise;
      postproj::emit_report(postproj::make_document("stiefel-demo", topt.seed, config, postproj::summary_to_json(rep)),
                            out_path(topt, "stiefel-demo"));
    } else if (con->parsed()) {
      postproj::ContractionConfig cfg;
      cfg.n_values = k_n;
      cfg.big_m = k_big_m;
      cfg.replicates = k_reps;
      cfg.samples = kopt.samples;
      cfg.workers = kopt.workers;
      if (k_model == "gaussian") {
        cfg.model = postproj::ContractionModel::gaussian;
        cfg.theta0 = postproj::Vector::Constant(1, k_theta0.empty() ? 0.0 : k_theta0.front());
        if (k_theta0.size() > 1) throw postproj::InvalidInput("contraction: gaussian model takes one --theta0");
      } else {
        cfg.model = postproj::ContractionModel::dirichlet;
        if (k_theta0.empty()) {
          k_theta0 = {0.3, 0.3, 0.4, 0.5, 0.3, 0.2};
          k_cols = 3;
        }
        if (k_cols < 2 || k_theta0.size() % k_cols != 0)
          throw postproj::InvalidInput("contraction: --theta0 must fill whole rows of --cols entries");
        cfg.theta0 = Eigen::Map<const postproj::Vector>(k_theta0.data(), static_cast<Eigen::Index>(k_theta0.size()));
        cfg.cols = k_cols;
        cfg.rows = k_theta0.size() / k_cols;
      }
      const auto rep = postproj::contraction_curve(cfg, postproj::RngStream{kopt.seed, 0});
      json config{{"samples", kopt.samples}, {"model", k_model}, {"big_m", k_big_m}, {"replicates", k_reps},
                  {"n_values", k_n}, {"theta0", std::vector<double>(cfg.theta0.data(), cfg.theta0.data() + cfg.theta0.size())}};
      if (cfg.model == postproj::ContractionModel::dirichlet) config["cols"] = k_cols;
      postproj::emit_report(
          postproj::make_document("contraction", kopt.seed, config, postproj::contraction_to_json(rep)),
          out_path(kopt, "contraction"));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
