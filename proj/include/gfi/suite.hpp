#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfi/densities.hpp"

namespace gfi {

// Malformed or inconsistent configuration; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DensitySpec {
  std::string id;      // defaults to a label built from family and params
  std::string family;  // scaled_gaussian, gaussian, mixture, quartic, logcosh, uniform, product
  std::map<std::string, std::vector<double>> params;  // scalars are one-element lists
  std::vector<DensitySpec> factors;                   // product family only
  bool recenter = false;
};

// Builds the factors of a density spec; one factor unless the family is `product`.
std::vector<RelativeDensity> make_density(const DensitySpec& spec);
// Family names understood by make_density.
const std::vector<std::string>& density_families();

enum class CheckStatus { pass, fail, skipped_hypothesis, skipped_unavailable };
const char* to_string(CheckStatus s);

struct CheckInfo {
  std::string name;
  std::string operation;  // the library call the check exercises
  double tolerance;       // pass iff margin >= -tolerance
  std::string provenance;
};
// Fixed registry, in report order.
const std::vector<CheckInfo>& check_registry();
const CheckInfo& find_check(const std::string& name);

struct SuiteConfig {
  std::vector<DensitySpec> densities;
  std::vector<std::string> checks;  // registry names; empty means all
  double grid_L = 8.0;
  std::size_t grid_n = kDefaultNodes;
  std::size_t quadrature_nodes = kDefaultNodes;
  std::map<std::string, double> tolerances;
  std::string format = "csv";
  std::string path;  // empty writes to stdout
};

// Parses a JSON config; ConfigError messages carry line and column for syntax errors.
SuiteConfig parse_config(const std::string& text);
SuiteConfig load_config(const std::string& path);

struct ReportRow {
  std::string density_id;
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  CheckStatus status = CheckStatus::pass;
  double tolerance = 0.0;
  std::string provenance;
  std::string reason;   // empty unless skipped, or an error code for failures
  std::string message;  // diagnostic text; not part of the written report
};

struct SuiteReport {
  std::vector<ReportRow> rows;
  bool any_fail() const;
};

// Rows are ordered by density, then registry order. Worker count comes from
// GFI_WORKERS (default: hardware concurrency); the output does not depend on it.
SuiteReport run_suite(const SuiteConfig& config);
std::size_t worker_count();

void write_csv(const SuiteReport& report, std::ostream& out);
void write_json(const SuiteReport& report, std::ostream& out);
// Reads reports written by either writer.
SuiteReport read_report(const std::string& path);

}  // namespace gfi
