#pragma once

// Contingency-table CSV input, JSON reports and density-grid CSV output.
//
// Report document: {"command", "seed", "config", "results"}. For summary
// reports, results = {"arms": {<arm>: {"parameters": {<name>: {...}}, "metrics": {...}}},
// "metrics": {...}, "warnings": [...]}.

#include "postproj/analytic.hpp"
#include "postproj/diagnostics.hpp"
#include "postproj/errors.hpp"
#include "postproj/linalg.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace postproj {

using json = nlohmann::json;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace detail

// Comma-separated counts, one table row per line. A first line with any
// non-numeric cell is treated as a header. Rows and columns in errors are 1-based
// file positions.
inline Matrix parse_contingency_csv_text(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first = true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv(line);
    std::vector<double> values;
    bool numeric = true;
    for (const auto cell : cells) {
      double v = 0.0;
      if (!detail::parse_number(cell, v)) {
        numeric = false;
        break;
      }
      values.push_back(v);
    }
    if (first && !numeric) {
      first = false;
      continue;  // header
    }
    first = false;
    if (!numeric) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        double v = 0.0;
        if (!detail::parse_number(cells[c], v)) throw ParseError("contingency csv: non-numeric cell", line_no, c + 1);
      }
    }
    if (width == 0) width = values.size();
    if (values.size() != width)
      throw ParseError("contingency csv: ragged row, expected " + std::to_string(width) + " cells", line_no,
                       std::min(values.size(), width) + 1);
    for (std::size_t c = 0; c < values.size(); ++c) {
      if (values[c] < 0.0) throw ParseError("contingency csv: negative count", line_no, c + 1);
      if (values[c] != std::round(values[c])) throw ParseError("contingency csv: non-integer count", line_no, c + 1);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError("contingency csv: no data rows", line_no, 1);
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

inline Matrix parse_contingency_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_contingency_csv_text(ss.str());
}

// ---------------------------------------------------------------------------
// JSON conversion.

inline void to_json(json& j, const ParameterSummary& p) {
  j = json{{"mean", p.mean}, {"ci", {p.ci_lower, p.ci_upper}}};
  j["atom_mass"] = p.atom_mass ? json(*p.atom_mass) : json(nullptr);
  j["lag1_autocorrelation"] = p.lag1 ? json(*p.lag1) : json(nullptr);
  j["ess"] = p.ess ? json(*p.ess) : json(nullptr);
}

inline std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

inline ParameterSummary parameter_from_json(const std::string& name, const json& j) {
  ParameterSummary p;
  p.name = name;
  p.mean = j.at("mean").get<double>();
  p.ci_lower = j.at("ci").at(0).get<double>();
  p.ci_upper = j.at("ci").at(1).get<double>();
  p.atom_mass = optional_number(j, "atom_mass");
  p.lag1 = optional_number(j, "lag1_autocorrelation");
  p.ess = optional_number(j, "ess");
  return p;
}

// Parameter order is kept in "order" since JSON objects are unordered.
inline json summary_to_json(const SummaryReport& r) {
  json arms = json::object();
  for (const auto& a : r.arms) {
    json params = json::object();
    json order = json::array();
    for (const auto& p : a.parameters) {
      params[p.name] = p;
      order.push_back(p.name);
    }
    arms[a.name] = json{{"parameters", params}, {"order", order}, {"metrics", a.metrics}};
  }
  json arm_order = json::array();
  for (const auto& a : r.arms) arm_order.push_back(a.name);
  return json{{"arms", arms}, {"arm_order", arm_order}, {"metrics", r.metrics}, {"warnings", r.warnings}};
}

inline SummaryReport summary_from_json(const std::string& command, const json& j) {
  SummaryReport r;
  r.command = command;
  for (const auto& name : j.at("arm_order")) {
    const json& a = j.at("arms").at(name.get<std::string>());
    ArmSummary arm;
    arm.name = name.get<std::string>();
    for (const auto& pn : a.at("order"))
      arm.parameters.push_back(parameter_from_json(pn.get<std::string>(), a.at("parameters").at(pn.get<std::string>())));
    arm.metrics = a.at("metrics").get<std::map<std::string, double>>();
    r.arms.push_back(std::move(arm));
  }
  r.metrics = j.at("metrics").get<std::map<std::string, double>>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

inline json contraction_to_json(const ContractionReport& r) {
  return json{{"n_values", r.n_values},
              {"radii", r.radii},
              {"mass_outside_unconstrained", r.mass_outside_unconstrained},
              {"mass_outside_projected", r.mass_outside_projected},
              {"se_unconstrained", r.se_unconstrained},
              {"se_projected", r.se_projected},
              {"replicate_unconstrained", r.replicate_unconstrained},
              {"replicate_projected", r.replicate_projected},
              {"domination_violations", r.domination_violations}};
}

inline ContractionReport contraction_from_json(const json& j) {
  ContractionReport r;
  j.at("n_values").get_to(r.n_values);
  j.at("radii").get_to(r.radii);
  j.at("mass_outside_unconstrained").get_to(r.mass_outside_unconstrained);
  j.at("mass_outside_projected").get_to(r.mass_outside_projected);
  j.at("se_unconstrained").get_to(r.se_unconstrained);
  j.at("se_projected").get_to(r.se_projected);
  j.at("replicate_unconstrained").get_to(r.replicate_unconstrained);
  j.at("replicate_projected").get_to(r.replicate_projected);
  j.at("domination_violations").get_to(r.domination_violations);
  return r;
}

inline json make_document(const std::string& command, std::uint64_t seed, json config, json results) {
  return json{{"command", command}, {"seed", seed}, {"config", std::move(config)}, {"results", std::move(results)}};
}

// ---------------------------------------------------------------------------
// Files.

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

inline void emit_report(const json& document, const std::filesystem::path& path) {
  write_text(path, document.dump(2) + "\n");
}

inline json read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("malformed report " + path.string() + ": " + e.what());
  }
}

inline std::string density_grid_csv(const DensityGrid& g) {
  std::string out = "point,density,atom_c_mass,atom_d_mass\n";
  char buf[128];
  for (std::size_t i = 0; i < g.point.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", g.point[i], g.density[i], g.atom_c_mass, g.atom_d_mass);
    out += buf;
  }
  return out;
}

inline void write_density_grid(const DensityGrid& g, const std::filesystem::path& path) {
  write_text(path, density_grid_csv(g));
}

}  // namespace postproj
