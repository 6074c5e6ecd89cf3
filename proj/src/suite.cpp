#include "gfi/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gfi/identities.hpp"
#include "gfi/ke_solver.hpp"
#include "gfi/stability.hpp"

namespace gfi {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string short_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// ---- density families ------------------------------------------------------

struct Family {
  std::string name;
  std::vector<std::string> required;
  std::map<std::string, double> defaults;
};

const std::vector<Family>& families() {
  static const std::vector<Family> f = {
      {"scaled_gaussian", {"lambda"}, {}},
      {"gaussian", {}, {{"mean", 0.0}, {"sigma", 1.0}}},
      {"mixture", {"weights", "means", "sigmas"}, {}},
      {"quartic", {"a"}, {{"tilt", 0.0}}},
      {"logcosh", {"b", "c"}, {{"tilt", 0.0}}},
      {"uniform", {"lo", "hi"}, {}},
      {"corpus", {"index"}, {}},
      {"product", {}, {}},
  };
  return f;
}

const Family* find_family(const std::string& name) {
  for (const auto& f : families())
    if (f.name == name) return &f;
  return nullptr;
}

double scalar(const DensitySpec& spec, const std::string& key) {
  const auto it = spec.params.find(key);
  if (it != spec.params.end()) {
    if (it->second.size() != 1)
      throw ConfigError(spec.family + ": parameter '" + key + "' must be a single number");
    return it->second[0];
  }
  const auto& d = find_family(spec.family)->defaults;
  return d.at(key);
}

void validate_spec(const DensitySpec& spec) {
  const Family* f = find_family(spec.family);
  if (!f) {
    std::string known;
    for (const auto& g : families()) known += (known.empty() ? "" : ", ") + g.name;
    throw ConfigError("unknown density family '" + spec.family + "' (known: " + known + ")");
  }
  for (const auto& [k, v] : spec.params) {
    const bool ok = std::find(f->required.begin(), f->required.end(), k) != f->required.end() ||
                    f->defaults.count(k);
    if (!ok) throw ConfigError(spec.family + ": unknown parameter '" + k + "'");
    if (v.empty()) throw ConfigError(spec.family + ": parameter '" + k + "' is empty");
  }
  for (const auto& k : f->required)
    if (!spec.params.count(k)) throw ConfigError(spec.family + ": missing parameter '" + k + "'");
  if (spec.family == "product") {
    if (spec.factors.empty()) throw ConfigError("product: needs a non-empty 'factors' list");
    for (const auto& s : spec.factors) {
      if (s.family == "product") throw ConfigError("product: factors cannot be products");
      validate_spec(s);
    }
  } else if (!spec.factors.empty()) {
    throw ConfigError(spec.family + ": 'factors' is only allowed for the product family");
  }
}

std::string default_id(const DensitySpec& spec) {
  if (spec.family == "corpus") {
    const auto corpus = standard_corpus();
    const double i = spec.params.at("index")[0];
    if (i >= 0 && i < static_cast<double>(corpus.size()) && i == std::floor(i))
      return corpus[static_cast<std::size_t>(i)].id;
  }
  std::string id = spec.family + "(";
  if (spec.family == "product") {
    for (std::size_t i = 0; i < spec.factors.size(); ++i)
      id += (i ? ";" : "") + (spec.factors[i].id.empty() ? default_id(spec.factors[i])
                                                         : spec.factors[i].id);
  } else {
    bool first = true;
    for (const auto& [k, v] : spec.params) {
      id += (first ? "" : ";") + k + "=";
      for (std::size_t i = 0; i < v.size(); ++i) id += (i ? ":" : "") + short_num(v[i]);
      first = false;
    }
  }
  id += ")";
  if (spec.recenter) id += "_recentered";
  return id;
}

RelativeDensity make_factor(const DensitySpec& spec) {
  const std::string& f = spec.family;
  RelativeDensity out = [&] {
    if (f == "scaled_gaussian") return scaled_gaussian(scalar(spec, "lambda"));
    if (f == "gaussian") return gaussian(scalar(spec, "mean"), scalar(spec, "sigma"));
    if (f == "mixture") {
      const auto& w = spec.params.at("weights");
      const auto& m = spec.params.at("means");
      const auto& s = spec.params.at("sigmas");
      if (w.size() != m.size() || w.size() != s.size())
        throw ConfigError("mixture: weights, means and sigmas must have equal length");
      return gaussian_mixture(w, m, s);
    }
    if (f == "quartic") return quartic(scalar(spec, "a"), scalar(spec, "tilt"));
    if (f == "logcosh") return logcosh(scalar(spec, "b"), scalar(spec, "c"), scalar(spec, "tilt"));
    if (f == "uniform") return uniform(scalar(spec, "lo"), scalar(spec, "hi"));
    if (f == "corpus") {
      const auto corpus = standard_corpus();
      const double i = scalar(spec, "index");
      if (!(i >= 0 && i < static_cast<double>(corpus.size()) && i == std::floor(i)))
        throw ConfigError("corpus: index must be an integer in [0, " +
                          std::to_string(corpus.size() - 1) + "]");
      return corpus[static_cast<std::size_t>(i)].density;
    }
    throw ConfigError("unknown density family '" + f + "'");
  }();
  return spec.recenter ? recenter(out) : out;
}

// ---- lazily shared per-density results ------------------------------------

template <class T>
class Lazy {
 public:
  const T& get(const std::function<T()>& make) const {
    std::call_once(flag_, [&] {
      try {
        value_.emplace(make());
      } catch (...) {
        error_ = std::current_exception();
      }
    });
    if (error_) std::rethrow_exception(error_);
    return *value_;
  }

 private:
  mutable std::once_flag flag_;
  mutable std::optional<T> value_;
  mutable std::exception_ptr error_;
};

struct Context {
  std::string id;
  std::vector<RelativeDensity> factors;
  ReportOptions report_options;
  SolverOptions solver_options;

  Lazy<DeficitReport> deficit;
  Lazy<bool> centered;
  Lazy<MomentSolution> solution;
  Lazy<AprioriReport> apriori;
  Lazy<MomentReport> moments;

  const RelativeDensity& nu() const { return factors.front(); }
};

// Thrown by evaluators to mark a row as skipped.
struct Skip {
  CheckStatus status;
  std::string reason;
};

struct Outcome {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  std::string provenance;
};

void require_full_support(const Context& c) {
  for (const auto& f : c.factors)
    if (f.compact()) throw Skip{CheckStatus::skipped_hypothesis, "compact_support"};
}

const DeficitReport& deficits(const Context& c) {
  require_full_support(c);
  return c.deficit.get([&] { return deficit_report(c.factors, c.report_options); });
}

Outcome bound_row(const Context& c, const std::string& name, const std::string& provenance) {
  const BoundEntry& b = deficits(c).bound(name);
  if (b.status == BoundStatus::hypothesis_unmet) throw Skip{CheckStatus::skipped_hypothesis, b.reason};
  if (b.status == BoundStatus::unavailable) throw Skip{CheckStatus::skipped_unavailable, b.reason};
  return {b.deficit, b.bound, b.margin, provenance};
}

const RelativeDensity& one_dimensional(const Context& c) {
  if (c.factors.size() != 1) throw Skip{CheckStatus::skipped_unavailable, "product_density"};
  return c.nu();
}

// Identities need finite Fisher information.
const RelativeDensity& identity_target(const Context& c) {
  const RelativeDensity& g = one_dimensional(c);
  require_full_support(c);
  return g;
}

const MomentSolution& solution(const Context& c) {
  const RelativeDensity& nu = one_dimensional(c);
  if (!c.centered.get([&] { return is_centered(nu); }))
    throw Skip{CheckStatus::skipped_hypothesis, "uncentered"};
  return c.solution.get([&] { return solve_1d(nu, c.solver_options); });
}

const AprioriReport& apriori(const Context& c) {
  const MomentSolution& s = solution(c);
  return c.apriori.get([&] { return apriori_checks(s, c.nu()); });
}

const MomentReport& moments(const Context& c) {
  const MomentSolution& s = solution(c);
  return c.moments.get([&] { return moment_and_exp_checks(s, c.nu()); });
}

Outcome identity_row(const IdentityReport& r) {
  return {r.lhs, r.rhs, -r.residual, "quadrature"};
}

Outcome nonnegative(double v, std::string provenance) { return {v, 0.0, v, std::move(provenance)}; }

using Evaluate = std::function<Outcome(const Context&)>;

struct RegistryEntry {
  CheckInfo info;
  Evaluate eval;
};

std::string cp_provenance(const Context& c) { return to_string(deficits(c).functionals.cp.provenance); }

const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> r = [] {
    std::vector<RegistryEntry> v;
    const auto add = [&](std::string name, std::string op, double tol, std::string prov, Evaluate e) {
      v.push_back({{std::move(name), std::move(op), tol, std::move(prov)}, std::move(e)});
    };
    add("lsi_deficit", "stability.lsi_deficit", 1e-9, "quadrature",
        [](const Context& c) { return nonnegative(deficits(c).lsi_deficit, "quadrature"); });
    add("tal_deficit", "stability.tal_deficit", 1e-9, "quadrature",
        [](const Context& c) { return nonnegative(deficits(c).tal_deficit, "quadrature"); });
    add("hwi_gap", "stability.hwi_gap", 1e-9, "quadrature",
        [](const Context& c) { return nonnegative(deficits(c).hwi_gap, "quadrature"); });
    for (const char* name : {"fil", "mainstab", "igncp"}) {
      add(name, std::string("stability.bound_") + name, 1e-6, "poincare-constant",
          [name](const Context& c) { return bound_row(c, name, cp_provenance(c)); });
    }
    add("bgrs", "stability.bound_bgrs", 1e-6, "quadrature",
        [](const Context& c) { return bound_row(c, "bgrs", "quadrature"); });
    add("tal_w11_delta", "stability.bound_tal_w11", 1e-6, "monotone-map",
        [](const Context& c) { return bound_row(c, "tal_w11_delta", "monotone-map"); });
    add("tal_w11_min", "stability.bound_tal_w11", 1e-6, "closed-form",
        [](const Context& c) { return bound_row(c, "tal_w11_min", "closed-form"); });
    add("lsi_cost", "stability.bound_lsi_cost", 5e-3, "lp-network-simplex",
        [](const Context& c) { return bound_row(c, "lsi_cost", "lp-network-simplex"); });
    add("caffarelli", "stability.caffarelli_ratio", 1e-6, "quadrature",
        [](const Context& c) { return bound_row(c, "caffarelli", "quadrature"); });
    add("delta_lemma", "stability.delta_lemma_checks", 1e-12, "sampled", [](const Context&) {
      static Lazy<DeltaLemmaReport> lemma;
      return nonnegative(lemma.get([] { return delta_lemma_checks(); }).worst(), "sampled");
    });

    add("ent_iden", "identities.ent_iden", 1e-4, "quadrature", [](const Context& c) {
      return identity_row(ent_iden(scaled_gaussian(1.0), identity_target(c), c.report_options.nodes));
    });
    add("bochner", "identities.bochner_identity", 1e-4, "quadrature", [](const Context& c) {
      return identity_row(bochner_identity(identity_target(c), c.report_options.nodes));
    });
    add("cross", "identities.cross_identity", 1e-4, "quadrature", [](const Context& c) {
      return identity_row(cross_identity(identity_target(c), c.report_options.nodes));
    });

    add("ke_mass", "ke_solver.solve_1d", 1e-8, "ke-solver", [](const Context& c) {
      const MomentSolution& s = solution(c);
      const double e = std::max(s.mass_error, s.barycenter_error);
      return Outcome{e, 0.0, -e, "ke-solver"};
    });
    add("ke_pushforward", "ke_solver.solve_1d", 1e-6, "ke-solver", [](const Context& c) {
      const double e = solution(c).pushforward_residual;
      return Outcome{e, 0.0, -e, "ke-solver"};
    });
    add("ke_local_min", "ke_solver.local_min_check", 1e-6, "ke-solver", [](const Context& c) {
      return nonnegative(local_min_check(solution(c), c.nu()).margin, "ke-solver");
    });
    add("ke_j_max", "ke_solver.j_functional", 1e-6, "ke-solver", [](const Context& c) {
      return nonnegative(j_max_check(solution(c), c.nu()).margin, "ke-solver");
    });
    add("ke_sdb", "ke_solver.apriori_checks", 1e-3, "spectral-gap-numeric", [](const Context& c) {
      const AprioriReport& a = apriori(c);
      if (!a.hessian_bound) throw Skip{CheckStatus::skipped_unavailable, "no_second_derivative"};
      if (!a.sdb_holds) throw Skip{CheckStatus::skipped_hypothesis, "hessian_bound_not_above_minus_one"};
      const double rhs = 1.0 + *a.hessian_bound;
      return Outcome{a.cp_mu, rhs, rhs - a.cp_mu, "spectral-gap-numeric"};
    });
    add("ke_distcontrol", "ke_solver.apriori_checks", 1e-6, "monotone-map", [](const Context& c) {
      const AprioriReport& a = apriori(c);
      if (!a.distcontrol_delta) throw Skip{CheckStatus::skipped_hypothesis, "no_entropy_fisher_gap"};
      return Outcome{a.distcontrol_lhs, a.distcontrol_rhs, a.distcontrol_rhs - a.distcontrol_lhs,
                     "monotone-map"};
    });
    add("ke_exp", "ke_solver.moment_and_exp_checks", 1e-6, "gauss-grid", [](const Context& c) {
      const MomentReport& m = moments(c);
      if (!m.exp_lhs) throw Skip{CheckStatus::skipped_hypothesis, m.exp_reason};
      // Relative margin: passes iff lhs <= rhs (1 + tol).
      return Outcome{*m.exp_lhs, *m.exp_rhs, 1.0 - *m.exp_lhs / *m.exp_rhs, "gauss-grid"};
    });
    add("ke_infconv", "ke_solver.moment_and_exp_checks", 1e-6, "legendre-grid",
        [](const Context& c) {
          const MomentReport& m = moments(c);
          if (m.infconv_delta.empty()) throw Skip{CheckStatus::skipped_unavailable, "not_computed"};
          std::size_t worst = 0;
          for (std::size_t i = 1; i < m.infconv_delta.size(); ++i)
            if (m.infconv_rhs[i] - m.infconv_lhs[i] < m.infconv_rhs[worst] - m.infconv_lhs[worst])
              worst = i;
          return Outcome{m.infconv_lhs[worst], m.infconv_rhs[worst],
                         m.infconv_rhs[worst] - m.infconv_lhs[worst], "legendre-grid"};
        });
    return v;
  }();
  return r;
}

const RegistryEntry& find_entry(const std::string& name) {
  for (const auto& e : registry())
    if (e.info.name == name) return e;
  throw ConfigError("unknown check '" + name + "'");
}

// ---- config parsing --------------------------------------------------------

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

double positive_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(where + ": must be positive");
  return v;
}

DensitySpec parse_density(const json& j, const std::string& where) {
  require_keys(j, where, {"id", "family", "params", "factors", "recenter"});
  DensitySpec s;
  if (!j.contains("family") || !j["family"].is_string())
    throw ConfigError(where + ": 'family' must be a string");
  s.family = j["family"].get<std::string>();
  if (j.contains("id")) {
    if (!j["id"].is_string()) throw ConfigError(where + ": 'id' must be a string");
    s.id = j["id"].get<std::string>();
  }
  if (j.contains("recenter")) {
    if (!j["recenter"].is_boolean()) throw ConfigError(where + ": 'recenter' must be a boolean");
    s.recenter = j["recenter"].get<bool>();
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError(where + ": 'params' must be an object");
    for (const auto& [k, v] : j["params"].items()) {
      std::vector<double> vals;
      if (v.is_number()) {
        vals.push_back(v.get<double>());
      } else if (v.is_array()) {
        for (const auto& x : v) {
          if (!x.is_number()) throw ConfigError(where + ".params." + k + ": expected numbers");
          vals.push_back(x.get<double>());
        }
      } else {
        throw ConfigError(where + ".params." + k + ": expected a number or a list of numbers");
      }
      s.params[k] = std::move(vals);
    }
  }
  if (j.contains("factors")) {
    if (!j["factors"].is_array()) throw ConfigError(where + ": 'factors' must be a list");
    for (std::size_t i = 0; i < j["factors"].size(); ++i)
      s.factors.push_back(parse_density(j["factors"][i], where + ".factors[" + std::to_string(i) + "]"));
  }
  try {
    validate_spec(s);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (s.id.empty()) s.id = default_id(s);
  return s;
}

// ---- CSV -------------------------------------------------------------------

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        out.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else if (ch != '\r') {
      out.back() += ch;
    }
  }
  return out;
}

double parse_num(const std::string& s) {
  if (s == "nan" || s.empty()) return kNaN;
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  return std::stod(s);
}

CheckStatus parse_status(const std::string& s) {
  for (auto st : {CheckStatus::pass, CheckStatus::fail, CheckStatus::skipped_hypothesis,
                  CheckStatus::skipped_unavailable})
    if (s == to_string(st)) return st;
  throw ConfigError("unknown status '" + s + "'");
}

const char* const kColumns[] = {"density_id", "check", "lhs",        "rhs",   "margin",
                                "status",     "tolerance", "provenance", "reason"};

ordered_json json_num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

}  // namespace

const std::vector<std::string>& density_families() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& f : families()) v.push_back(f.name);
    return v;
  }();
  return names;
}

std::vector<RelativeDensity> make_density(const DensitySpec& spec) {
  validate_spec(spec);
  std::vector<RelativeDensity> out;
  if (spec.family == "product") {
    for (const auto& f : spec.factors) out.push_back(make_factor(f));
  } else {
    out.push_back(make_factor(spec));
  }
  return out;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped_hypothesis: return "skipped:hypothesis";
    case CheckStatus::skipped_unavailable: return "skipped:unavailable";
  }
  return "?";
}

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const CheckInfo& find_check(const std::string& name) { return find_entry(name).info; }

SuiteConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error at " + line_col(text, e.byte == 0 ? 0 : e.byte - 1) +
                      ": " + e.what());
  }
  require_keys(j, "config", {"densities", "checks", "grid", "quadrature", "tolerances", "output"});
  SuiteConfig c;

  if (!j.contains("densities")) throw ConfigError("config: 'densities' is required");
  const json& d = j["densities"];
  if (d.is_string() && d.get<std::string>() == "corpus") {
    const auto corpus = standard_corpus();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      DensitySpec s;
      s.family = "corpus";
      s.params["index"] = {static_cast<double>(i)};
      s.id = corpus[i].id;
      c.densities.push_back(std::move(s));
    }
  } else if (d.is_array()) {
    for (std::size_t i = 0; i < d.size(); ++i)
      c.densities.push_back(parse_density(d[i], "densities[" + std::to_string(i) + "]"));
  } else {
    throw ConfigError("config: 'densities' must be a list or \"corpus\"");
  }
  if (c.densities.empty()) throw ConfigError("config: 'densities' is empty");
  std::set<std::string> ids;
  for (const auto& s : c.densities)
    if (!ids.insert(s.id).second) throw ConfigError("config: duplicate density id '" + s.id + "'");

  if (j.contains("checks")) {
    if (!j["checks"].is_array()) throw ConfigError("config: 'checks' must be a list");
    for (const auto& x : j["checks"]) {
      if (!x.is_string()) throw ConfigError("config: check names must be strings");
      const std::string name = x.get<std::string>();
      if (name == "all") continue;
      find_entry(name);
      c.checks.push_back(name);
    }
  }

  if (j.contains("grid")) {
    require_keys(j["grid"], "grid", {"L", "n"});
    if (j["grid"].contains("L")) c.grid_L = positive_number(j["grid"]["L"], "grid.L");
    if (j["grid"].contains("n")) {
      const double n = positive_number(j["grid"]["n"], "grid.n");
      if (n < 101 || n != std::floor(n)) throw ConfigError("grid.n: must be an integer >= 101");
      c.grid_n = static_cast<std::size_t>(n);
    }
  }
  if (j.contains("quadrature")) {
    require_keys(j["quadrature"], "quadrature", {"nodes"});
    if (j["quadrature"].contains("nodes")) {
      const double n = positive_number(j["quadrature"]["nodes"], "quadrature.nodes");
      if (n < 101 || n != std::floor(n)) throw ConfigError("quadrature.nodes: must be an integer >= 101");
      c.quadrature_nodes = static_cast<std::size_t>(n);
    }
  }
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) throw ConfigError("tolerances: expected an object");
    for (const auto& [k, v] : j["tolerances"].items()) {
      find_entry(k);
      c.tolerances[k] = positive_number(v, "tolerances." + k);
    }
  }
  if (j.contains("output")) {
    require_keys(j["output"], "output", {"format", "path"});
    if (j["output"].contains("format")) {
      if (!j["output"]["format"].is_string()) throw ConfigError("output.format: expected a string");
      c.format = j["output"]["format"].get<std::string>();
      if (c.format != "csv" && c.format != "json")
        throw ConfigError("output.format: must be 'csv' or 'json'");
    }
    if (j["output"].contains("path")) {
      if (!j["output"]["path"].is_string()) throw ConfigError("output.path: expected a string");
      c.path = j["output"]["path"].get<std::string>();
    }
  }
  return c;
}

SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

bool SuiteReport::any_fail() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const ReportRow& r) { return r.status == CheckStatus::fail; });
}

std::size_t worker_count() {
  if (const char* env = std::getenv("GFI_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SuiteReport run_suite(const SuiteConfig& config) {
  std::vector<const RegistryEntry*> checks;
  if (config.checks.empty()) {
    for (const auto& e : registry()) checks.push_back(&e);
  } else {
    for (const auto& e : registry())
      if (std::find(config.checks.begin(), config.checks.end(), e.info.name) != config.checks.end())
        checks.push_back(&e);
  }

  std::vector<std::unique_ptr<Context>> contexts;
  for (const auto& spec : config.densities) {
    auto c = std::make_unique<Context>();
    c->id = spec.id.empty() ? default_id(spec) : spec.id;
    try {
      c->factors = make_density(spec);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("density '" + c->id + "': " + e.what());
    }
    c->report_options.nodes = config.quadrature_nodes;
    c->solver_options.nodes = config.grid_n;
    c->solver_options.max_step = 2.0 * config.grid_L / static_cast<double>(config.grid_n - 1);
    contexts.push_back(std::move(c));
  }

  SuiteReport report;
  report.rows.resize(contexts.size() * checks.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < report.rows.size();) {
      const Context& c = *contexts[k / checks.size()];
      const RegistryEntry& e = *checks[k % checks.size()];
      ReportRow& row = report.rows[k];
      row.density_id = c.id;
      row.check = e.info.name;
      const auto tol = config.tolerances.find(e.info.name);
      row.tolerance = tol != config.tolerances.end() ? tol->second : e.info.tolerance;
      row.provenance = e.info.provenance;
      row.lhs = row.rhs = row.margin = kNaN;
      try {
        const Outcome o = e.eval(c);
        row.lhs = o.lhs;
        row.rhs = o.rhs;
        row.margin = o.margin;
        row.provenance = o.provenance;
        row.status = o.margin >= -row.tolerance ? CheckStatus::pass : CheckStatus::fail;
        if (row.status == CheckStatus::fail) row.reason = "margin_below_tolerance";
      } catch (const Skip& s) {
        row.status = s.status;
        row.reason = s.reason;
      } catch (const UnavailableError& ex) {
        row.status = CheckStatus::skipped_unavailable;
        row.reason = "unavailable";
        row.message = ex.what();
      } catch (const DomainError& ex) {
        row.status = CheckStatus::skipped_unavailable;
        row.reason = "domain_error";
        row.message = ex.what();
      } catch (const std::exception& ex) {
        row.status = CheckStatus::fail;
        row.reason = "numerical_error";
        row.message = ex.what();
      }
    }
  };
  const std::size_t n = std::min(worker_count(), report.rows.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return report;
}

void write_csv(const SuiteReport& report, std::ostream& out) {
  for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const auto& r : report.rows) {
    out << csv_field(r.density_id) << ',' << csv_field(r.check) << ',' << num(r.lhs) << ','
        << num(r.rhs) << ',' << num(r.margin) << ',' << to_string(r.status) << ','
        << num(r.tolerance) << ',' << csv_field(r.provenance) << ',' << csv_field(r.reason) << '\n';
  }
}

void write_json(const SuiteReport& report, std::ostream& out) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    ordered_json o = ordered_json::object();
    o["density_id"] = r.density_id;
    o["check"] = r.check;
    o["lhs"] = json_num(r.lhs);
    o["rhs"] = json_num(r.rhs);
    o["margin"] = json_num(r.margin);
    o["status"] = to_string(r.status);
    o["tolerance"] = json_num(r.tolerance);
    o["provenance"] = r.provenance;
    o["reason"] = r.reason;
    rows.push_back(std::move(o));
  }
  ordered_json doc = ordered_json::object();
  doc["columns"] = std::vector<std::string>(std::begin(kColumns), std::end(kColumns));
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

SuiteReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read report '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  SuiteReport report;

  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(path + ": parse error at " + line_col(text, e.byte ? e.byte - 1 : 0));
    }
    const auto number = [](const json& v) { return v.is_number() ? v.get<double>() : kNaN; };
    try {
      for (const auto& o : j.at("rows")) {
        ReportRow r;
        r.density_id = o.at("density_id").get<std::string>();
        r.check = o.at("check").get<std::string>();
        r.lhs = number(o.at("lhs"));
        r.rhs = number(o.at("rhs"));
        r.margin = number(o.at("margin"));
        r.status = parse_status(o.at("status").get<std::string>());
        r.tolerance = number(o.at("tolerance"));
        r.provenance = o.at("provenance").get<std::string>();
        r.reason = o.value("reason", "");
        report.rows.push_back(std::move(r));
      }
    } catch (const json::exception& e) {
      throw ConfigError(path + ": malformed report: " + e.what());
    }
    return report;
  }

  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (lineno == 1) {
      if (f.size() < 8 || f[0] != "density_id") throw ConfigError(path + ": missing report header");
      continue;
    }
    if (f.size() < 8)
      throw ConfigError(path + ": line " + std::to_string(lineno) + ": expected at least 8 fields");
    ReportRow r;
    try {
      r.density_id = f[0];
      r.check = f[1];
      r.lhs = parse_num(f[2]);
      r.rhs = parse_num(f[3]);
      r.margin = parse_num(f[4]);
      r.status = parse_status(f[5]);
      r.tolerance = parse_num(f[6]);
      r.provenance = f[7];
      if (f.size() > 8) r.reason = f[8];
    } catch (const std::exception& e) {
      throw ConfigError(path + ": line " + std::to_string(lineno) + ": " + e.what());
    }
    report.rows.push_back(std::move(r));
  }
  return report;
}

}  // namespace gfi
