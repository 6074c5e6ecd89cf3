#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfi/functionals.hpp"
#include "gfi/transport.hpp"

namespace gfi {

// Delta(t) = t - log(1 + t) for t > -1, and its conjugate
// Delta*(s) = -s - log(1 - s) for s <= 1 (+inf at s = 1).
double delta(double t);
double delta_star(double s);

double lsi_deficit(double fisher, double ent);
double tal_deficit(double ent, double w2);
double hwi_gap(double fisher, double ent, double w2);

// 1/2 (C log C - C + 1)/(C - 1)^2 * I, continuous at C = 1.
double bound_fil(double fisher, double cp);
// I/(1 + sqrt(C))^2, compared against I - 2 Ent.
double bound_mainstab(double fisher, double cp);
// n (C log C - C + 1)/(2C); empty when C > 1.
std::optional<double> bound_igncp(double cp, int n);
// n Delta(cross/n - 1), compared against I - 2 Ent.
double bound_bgrs(double cross, int n);

struct TalW11Bound {
  double delta_form;  // Delta(t), t = W11 / (2 sqrt(n))
  double min_form;    // (1 - log 2) min(t, t^2)
};
TalW11Bound bound_tal_w11(double w11, int n);

// K_a / C_LSI.
double bound_lsi_cost(double k_a, double clsi);

struct CaffarelliRatio {
  double ratio;    // (Ent/W2^2 - 1/2) / sqrt(eps)
  double epsilon;  // min of 1 - (log g)'' over the effective support
};
// Empty when the convexity hypothesis fails, (log g)'' is unavailable, or W2 = 0.
std::optional<CaffarelliRatio> caffarelli_ratio(const RelativeDensity& g, double ent, double w2,
                                                 std::size_t nodes = kDefaultNodes);

struct DeltaLemmaReport {
  // Smallest slack of each property over the sample; all should be >= -1e-12.
  double convexity;
  double sqrt_concavity;
  double sqrt_subadditivity;
  double reflection;  // Delta(t) >= Delta(|t|)
  double min_lower_bound;

  double worst() const;
};
DeltaLemmaReport delta_lemma_checks(std::size_t samples = 10000);

enum class BoundStatus { evaluated, hypothesis_unmet, unavailable };
const char* to_string(BoundStatus s);

struct BoundEntry {
  std::string name;
  double deficit = 0.0;  // left-hand side
  double bound = 0.0;    // right-hand side
  double margin = 0.0;   // deficit - bound
  BoundStatus status = BoundStatus::evaluated;
  std::string reason;  // machine-readable code when not evaluated
  std::string note;
};

struct ReportOptions {
  std::size_t nodes = kDefaultNodes;
  bool lsi_cost = true;  // solve the K_a LP
  std::size_t ka_atoms = 256;
};

struct DeficitReport {
  FunctionalValues functionals;
  double w2_to_gamma = 0.0;
  double w11_to_gamma = 0.0;
  double lsi_deficit = 0.0;
  double tal_deficit = 0.0;
  double hwi_gap = 0.0;
  bool centered = true;
  std::vector<BoundEntry> bounds;

  const BoundEntry& bound(const std::string& name) const;
};

DeficitReport deficit_report(const RelativeDensity& g, const ReportOptions& options = {});
// Product density with one factor per coordinate.
DeficitReport deficit_report(std::span<const RelativeDensity> factors,
                             const ReportOptions& options = {});

// |mean| <= 1e-6 sd.
bool is_centered(const RelativeDensity& g);

}  // namespace gfi
