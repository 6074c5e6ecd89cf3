// Acceptance runner: one PASS/FAIL line per criterion; exit status 1 if any fails.
// Usage: acceptance <path-to-gfi-cli>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gfi/identities.hpp"
#include "gfi/ke_solver.hpp"
#include "gfi/stability.hpp"
#include "gfi/transport.hpp"

using namespace gfi;

namespace {

const double kLog2 = std::log(2.0);
const double kLambdas[] = {0.25, 0.5, 2.0, 4.0};

struct Result {
  bool pass = true;
  std::string detail;
};

// Tracks the worst value of a quantity that must stay below a limit.
struct Worst {
  double value = 0.0;
  std::string where;
  void update(double v, const std::string& w) {
    if (!(v <= value)) {  // NaN counts as worst
      value = v;
      where = w;
    }
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string lambda_id(double l) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "lambda=%g", l);
  return buf;
}

bool below(const Worst& w, double limit) { return w.value <= limit; }

Result sharpness() {
  Worst fil, igncp, bgrs;
  for (double l : kLambdas) {
    const auto r = deficit_report(scaled_gaussian(l), {.lsi_cost = false});
    const auto id = lambda_id(l);
    fil.update(std::abs(r.bound("fil").margin), id);
    bgrs.update(std::abs(r.bound("bgrs").margin), id);
    if (l >= 2.0) {
      const auto& b = r.bound("igncp");
      igncp.update(b.status == BoundStatus::evaluated ? std::abs(b.margin) : kInf, id);
    }
  }
  return {below(fil, 1e-6) && below(igncp, 1e-6) && below(bgrs, 1e-6),
          "max |deficit - bound|: fil " + sci(fil.value) + ", igncp " + sci(igncp.value) +
              ", bgrs " + sci(bgrs.value) + " (limit 1e-6)"};
}

Result closed_forms() {
  const auto wide = scaled_gaussian(0.25);
  const auto r = deficit_report(wide, {.lsi_cost = false});
  // Same measure without metadata, so C_P goes through the spectral solver.
  const RelativeDensity bare(wide.model(), wide.support(), false, {}, "N(0,4) without metadata");
  const auto cp = poincare_constant(bare);

  struct Item {
    const char* name;
    double value, exact, tol;
  };
  const Item items[] = {
      {"Ent", r.functionals.ent, 1.5 - kLog2, 1e-6},
      {"I", r.functionals.fisher, 2.25, 1e-6},
      {"W2", r.w2_to_gamma, 1.0, 1e-6},
      {"C_P", cp.value, 4.0, 1e-3},
      {"tal_deficit", r.tal_deficit, delta(1.0), 1e-6},
      {"hwi_gap", r.hwi_gap, kLog2 - 0.5, 1e-6},
  };
  Result out;
  for (const auto& it : items) {
    const double err = std::abs(it.value - it.exact);
    out.pass = out.pass && err <= it.tol;
    out.detail += std::string(out.detail.empty() ? "" : ", ") + it.name + " err " + sci(err);
  }
  out.pass = out.pass && cp.provenance == Provenance::spectral_gap_numeric;
  return out;
}

Result identity_suites() {
  const auto corpus = standard_corpus();
  Worst res, res_gauss, neg;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& e = corpus[i];
    const bool gaussian = e.id.rfind("scaled_gaussian", 0) == 0;
    std::vector<std::pair<std::string, IdentityReport>> reports = {
        {"bochner", bochner_identity(e.density)},
        {"cross", cross_identity(e.density)},
        {"ent_iden", ent_iden(e.density, corpus[(i + 3) % corpus.size()].density)},
        {"ent_iden_gamma", ent_iden(scaled_gaussian(1.0), e.density)},
    };
    for (const auto& [name, r] : reports) {
      res.update(r.residual, e.id + "/" + name);
      if (gaussian) res_gauss.update(r.residual, e.id + "/" + name);
    }
    const auto& b = reports[0].second;
    for (const char* t : {"two_delta", "hessian_sq", "third_order"}) neg.update(-b.term(t), e.id + "/" + t);
    neg.update(-reports[2].second.term("hessian_remainder"), e.id + "/hessian_remainder");
    neg.update(-reports[3].second.term("hessian_remainder"), e.id + "/hessian_remainder");
  }
  return {below(res, 1e-4) && below(res_gauss, 1e-8) && below(neg, 1e-9),
          "max residual " + sci(res.value) + " (" + res.where + "), Gaussian cases " +
              sci(res_gauss.value) + ", worst negative term " + sci(neg.value)};
}

Result inequality_suites() {
  Worst slack, ka;
  std::size_t evaluated = 0;
  for (const auto& e : standard_corpus()) {
    const auto r = deficit_report(e.density);
    for (const auto& b : r.bounds) {
      if (b.status != BoundStatus::evaluated) continue;
      ++evaluated;
      if (b.name == "lsi_cost") ka.update(-b.margin, e.id);
      else slack.update(-b.margin, e.id + "/" + b.name);
    }
  }
  const auto lemma = delta_lemma_checks(10000);
  return {below(slack, 1e-6) && below(ka, 5e-3) && lemma.worst() >= -1e-12,
          std::to_string(evaluated) + " margins; worst shortfall " + sci(slack.value) +
              ", K_a shortfall " + sci(ka.value) + ", Delta lemma slack " + sci(lemma.worst())};
}

Result ke_solver() {
  Worst sup, push, mass, margin;
  for (double l : kLambdas) {
    const auto sol = solve_1d(scaled_gaussian(l));
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
      const double x = sol.grid[i];
      if (std::abs(x) > 4.0) continue;
      const double exact = 0.5 * (1.0 / l - 1.0) * x * x + 0.5 * std::log(l);
      sup.update(std::abs(sol.phi[i] - exact), lambda_id(l));
    }
  }
  for (const auto& e : standard_corpus()) {
    const auto sol = solve_1d(e.density);
    push.update(sol.pushforward_residual, e.id);
    mass.update(std::max(sol.mass_error, sol.barycenter_error), e.id);
    margin.update(-local_min_check(sol, e.density).margin, e.id + "/local_min");
    margin.update(-j_max_check(sol, e.density).margin, e.id + "/j_max");
  }
  return {below(sup, 1e-4) && below(push, 1e-6) && below(mass, 1e-8) && below(margin, 1e-6),
          "sup|phi - exact| " + sci(sup.value) + ", pushforward " + sci(push.value) +
              ", mass/barycenter " + sci(mass.value) + ", worst perturbation shortfall " +
              sci(margin.value)};
}

Result sdb_bound() {
  Worst excess;
  std::size_t applicable = 0;
  double equality = kInf;
  for (const auto& e : standard_corpus()) {
    const auto a = apriori_checks(solve_1d(e.density), e.density);
    if (!a.hessian_bound || !a.sdb_holds) continue;
    ++applicable;
    const double rhs = 1.0 + *a.hessian_bound;
    excess.update(a.cp_mu - rhs, e.id);
    if (e.id == "scaled_gaussian_4") equality = std::abs(a.cp_mu - rhs);
  }
  return {below(excess, 1e-3) && equality <= 1e-3,
          std::to_string(applicable) + " cases; max C_P(mu) - (1 + c) " + sci(excess.value) +
              ", equality gap on N(0,1/4) " + sci(equality)};
}

Result exp_bound() {
  Worst ratio;
  std::size_t applicable = 0;
  double lhs = std::nan(""), rhs = std::nan("");
  for (const auto& e : standard_corpus()) {
    const auto m = moment_and_exp_checks(solve_1d(e.density), e.density);
    if (!m.exp_lhs) continue;
    ++applicable;
    ratio.update(*m.exp_lhs / *m.exp_rhs - 1.0, e.id);
    if (e.id == "scaled_gaussian_4") {
      lhs = *m.exp_lhs;
      rhs = *m.exp_rhs;
    }
  }
  // Closed forms for nu = N(0, 1/4): phi = log 2 - 3x^2/8, sup g = 2.
  const double lhs_exact = 1.0 / std::sqrt(0.4375);
  const double rhs_exact = 2.0 * std::exp(kLog2 - 0.375);
  const double e_lhs = std::abs(lhs - lhs_exact), e_rhs = std::abs(rhs - rhs_exact);
  return {below(ratio, 1e-6) && e_lhs <= 1e-6 && e_rhs <= 1e-6,
          std::to_string(applicable) + " cases; max lhs/rhs - 1 " + sci(ratio.value) +
              "; N(0,1/4): lhs " + std::to_string(lhs) + " (err " + sci(e_lhs) + "), rhs " +
              std::to_string(rhs) + " (err " + sci(e_rhs) + " vs 2e^{log 2 - 3/8}; the listed 2.748959 is off by " +
              sci(std::abs(rhs_exact - 2.748959)) + ")"};
}

Result lp_cross_validation() {
  const auto corpus = standard_corpus();
  const auto sq = [](double x, double y) { return (x - y) * (x - y); };
  const auto ab = [](double x, double y) { return std::abs(x - y); };
  Worst e256, e512;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& mu = corpus[i].density;
    const auto& nu = corpus[(i + 3) % corpus.size()].density;
    const std::string id = corpus[i].id + "->" + corpus[(i + 3) % corpus.size()].id;
    const double w2sq = w2_squared(mu, nu), w1v = w1(mu, nu);
    for (std::size_t n : {256u, 512u}) {
      const auto a = quantile_atoms(mu, n), b = quantile_atoms(nu, n);
      const double err = std::max(std::abs(lp_transport(a, b, sq).cost - w2sq),
                                  std::abs(lp_transport(a, b, ab).cost - w1v));
      (n == 256 ? e256 : e512).update(err, id);
    }
  }
  return {below(e256, 3e-2) && below(e512, 1.5e-2),
          "10 pairs; max error 256 atoms " + sci(e256.value) + " (limit 3e-2), 512 atoms " +
              sci(e512.value) + " (limit 1.5e-2)"};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("gfi_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string config = (dir / "corpus.json").string();
  std::ofstream(config) << R"({"densities": "corpus", "checks": ["all"]})" << '\n';
  std::string reports[2];
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const std::string out = (dir / ("run" + std::to_string(k) + ".csv")).string();
    const std::string cmd = "\"" + cli + "\" suite " + config + " --out " + out + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    codes[k] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    reports[k] = slurp(out);
  }
  fs::remove_all(dir);
  const bool same = !reports[0].empty() && reports[0] == reports[1];
  return {same && codes[0] == 0 && codes[1] == 0,
          std::string(same ? "byte-identical" : "reports differ") + " (" +
              std::to_string(reports[0].size()) + " bytes, exit codes " + std::to_string(codes[0]) +
              "/" + std::to_string(codes[1]) + ")"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"sharpness on scaled Gaussians", sharpness},
      {"closed-form functionals on N(0,4)", closed_forms},
      {"identity residuals", identity_suites},
      {"inequality margins", inequality_suites},
      {"moment-measure solver", ke_solver},
      {"Poincare bound for the solution", sdb_bound},
      {"exponential integrability bound", exp_bound},
      {"LP cross-validation", lp_cross_validation},
      {"suite determinism", [&] { return determinism(cli); }},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && r.pass;
    std::printf("criterion %zu %s: %s [%.1fs] %s\n", i + 1, r.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), secs, r.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
