#pragma once

#include <map>
#include <optional>
#include <vector>

#include "verimech/core.hpp"

namespace verimech {

struct McvParams {
  double gamma = 0.0;
  double xi = 0.0;
};

struct PvParams {
  double theta = 1.0;
  int kappa = 1;
};

/// Parameters of the histogram mechanism. The reference histogram is the true
/// type histogram H; entries with count 0 extend the report grid.
struct HistogramParams {
  double alpha = 1.1;
  double epsilon = 0.2;
  std::map<double, int> reference_histogram;

  /// ceil(2 / (alpha - 1)).
  int kappa() const;
  /// Sorted grid of admissible types.
  std::vector<double> type_grid() const;
  void validate() const;
};

Mechanism make_verify_all();
Mechanism make_pay_all();
Mechanism make_huge_penalty(double eps);

/// Monotone-cutoff verification: free pass up to gamma, audit probability
/// (r - gamma) / (r + xi) above it, penalty -xi for a mismatched sample.
Mechanism make_mcv(const McvParams& p);

/// Cutoffs for the agent-specific MCV variant, one per agent, computed from
/// the leave-one-out distribution of the other agents' reports.
std::vector<McvParams> asmcv_assign(double beta, const ReportProfile& profile, double xi);

/// Leave-one-out empirical distribution of reports j != i.
DiscreteDistribution leave_one_out(const ReportProfile& profile, std::size_t i);

Mechanism make_lv();

/// kappa^kappa / (kappa+1)^(kappa+1).
double pv_constant(int kappa);

/// Lowest realized PV grade: pv_constant - 1 / (kappa * theta^(kappa+1)).
double pv_min_grade(const PvParams& p);

/// Polynomial verification. theta > 1 is accepted only with analysis_mode, and
/// the result is then marked analysis_only.
Mechanism make_pv(const PvParams& p, bool analysis_mode = false);

/// Minimal theta for which PV respects a penalty floor of xi.
double theta_star(double xi, int kappa);

struct HistogramMechanism {
  /// Maximal over-reported type, if any.
  std::optional<double> violating_type;
  std::vector<bool> verified;
  Mechanism mechanism;
};

/// Builds the histogram mechanism for a given report profile.
HistogramMechanism make_histogram(const HistogramParams& p, const ReportProfile& profile);

}  // namespace verimech
