#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gfi/ke_solver.hpp"
#include "gfi/stability.hpp"
#include "gfi/suite.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

void write_report(const gfi::SuiteReport& report, const std::string& format, const std::string& path) {
  std::ostringstream ss;
  if (format == "json") gfi::write_json(report, ss);
  else gfi::write_csv(report, ss);
  if (path.empty()) {
    std::cout << ss.str();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gfi::ConfigError("cannot write '" + path + "'");
  out << ss.str();
}

void print_diagnostics(const gfi::SuiteReport& report) {
  for (const auto& r : report.rows) {
    if (r.message.empty()) continue;
    std::cerr << r.density_id << " / " << r.check << ": " << r.message << '\n';
  }
}

int run_suite_command(const std::string& config_path, const std::string& out_override,
                      const std::string& format_override) {
  gfi::SuiteConfig config = gfi::load_config(config_path);
  if (!out_override.empty()) config.path = out_override;
  if (!format_override.empty()) config.format = format_override;
  const gfi::SuiteReport report = gfi::run_suite(config);
  write_report(report, config.format, config.path);
  print_diagnostics(report);
  std::size_t fails = 0;
  for (const auto& r : report.rows) fails += r.status == gfi::CheckStatus::fail;
  if (fails) std::cerr << fails << " check(s) failed\n";
  return fails ? kExitFail : kExitPass;
}

gfi::DensitySpec parse_solve_spec(const std::string& family, const std::vector<std::string>& params) {
  gfi::DensitySpec spec;
  spec.family = family;
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw gfi::ConfigError("--param expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    std::vector<double> values;
    std::stringstream ss(kv.substr(eq + 1));
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw gfi::ConfigError("--param " + key + ": '" + item + "' is not a number");
      }
    }
    spec.params[key] = std::move(values);
  }
  if (family == "product") throw gfi::ConfigError("solve: the product family is not one-dimensional");
  return spec;
}

int run_solve_command(const std::string& family, const std::vector<std::string>& params,
                      std::string out_path) {
  const gfi::DensitySpec spec = parse_solve_spec(family, params);
  gfi::RelativeDensity nu = [&] {
    try {
      return gfi::make_density(spec).front();
    } catch (const gfi::ConfigError&) {
      throw;
    } catch (const gfi::DomainError& e) {
      throw gfi::ConfigError(e.what());
    }
  }();
  double shift = 0.0;
  if (!gfi::is_centered(nu)) {
    shift = -nu.mean();
    std::cerr << "warning: " << nu.label() << " has mean " << -shift << "; recentering\n";
    nu = gfi::recenter(nu);
  }

  gfi::MomentSolution sol;
  try {
    sol = gfi::solve_1d(nu);
  } catch (const gfi::NumericalError& e) {
    std::cerr << "solve failed: " << e.what() << '\n';
    return kExitFail;
  }
  const gfi::Grid1D ygrid = nu.grid(4001);
  const double j = gfi::j_functional(ygrid, gfi::conjugate_potential(sol, ygrid), nu);
  const gfi::AprioriReport a = gfi::apriori_checks(sol, nu);

  if (out_path.empty()) out_path = family + ".csv";
  std::filesystem::path csv(out_path), diag(out_path);
  diag.replace_extension(".json");
  if (csv == diag) diag += ".json";
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw gfi::ConfigError("cannot write '" + csv.string() + "'");
    sol.write_csv(out);
  }
  nlohmann::json d = nlohmann::json::object();
  d["density"] = nu.label();
  d["recenter_shift"] = shift;
  d["window"] = {sol.grid.lo(), sol.grid.hi()};
  d["nodes"] = sol.grid.size();
  d["iterations"] = sol.iterations;
  d["mass_error"] = sol.mass_error;
  d["barycenter_error"] = sol.barycenter_error;
  d["pushforward_residual"] = sol.pushforward_residual;
  d["match_jump"] = sol.match_jump;
  d["f_gamma"] = sol.f_gamma;
  d["j"] = j;
  d["cp_mu"] = a.cp_mu;
  d["min_curvature"] = sol.min_curvature();
  {
    std::ofstream out(diag, std::ios::binary);
    if (!out) throw gfi::ConfigError("cannot write '" + diag.string() + "'");
    out << d.dump(2) << '\n';
  }
  std::cout << csv.string() << '\n' << diag.string() << '\n';
  return kExitPass;
}

int run_report_command(const std::vector<std::string>& files, const std::string& out_path,
                       const std::string& format) {
  gfi::SuiteReport merged;
  for (const auto& f : files) {
    const auto r = gfi::read_report(f);
    merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
  }
  write_report(merged, format, out_path);
  return merged.any_fail() ? kExitFail : kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian functional inequalities: deficits, identities and moment-measure solver"};
  app.require_subcommand(1);

  std::string config_path, suite_out, suite_format;
  auto* suite = app.add_subcommand("suite", "Run the checks described by a JSON config");
  suite->add_option("config", config_path, "Config file")->required();
  suite->add_option("--out", suite_out, "Report path (overrides output.path)");
  suite->add_option("--format", suite_format, "csv or json (overrides output.format)")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string family, solve_out;
  std::vector<std::string> params;
  auto* solve = app.add_subcommand("solve", "Solve the moment-measure problem for one density");
  solve->add_option("family", family, "Density family")->required();
  solve->add_option("--param", params, "Family parameter as key=value (lists comma separated)");
  solve->add_option("--out", solve_out, "CSV path; diagnostics go next to it as .json");

  std::vector<std::string> merge_files;
  std::string report_out, report_format = "csv";
  auto* report = app.add_subcommand("report", "Merge report files");
  report->add_option("--merge", merge_files, "Report files (CSV or JSON)")->required();
  report->add_option("--out", report_out, "Output path (default stdout)");
  report->add_option("--format", report_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*suite) return run_suite_command(config_path, suite_out, suite_format);
    if (*solve) return run_solve_command(family, params, solve_out);
    if (*report) return run_report_command(merge_files, report_out, report_format);
  } catch (const gfi::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
