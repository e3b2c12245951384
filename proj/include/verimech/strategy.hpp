#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "verimech/core.hpp"
#include "verimech/mechanisms.hpp"
#include "verimech/scoring.hpp"

namespace verimech {

/// Gains at or below this are ties (weak dominance).
inline constexpr double kProfitTol = 1e-9;

enum class ViolationKind {
  manipulation,         // HR1: a misreport strictly beats the truth
  punished_truth,       // HR2: a truthful agent is graded below her type
  negative_bias,        // HR2': a truthful agent's expected grade is below her type
  floor_breach,         // HR3: some realized grade is below -xi
};

std::string to_string(ViolationKind kind);

struct ViolationReport {
  ViolationKind kind = ViolationKind::manipulation;
  double agent_type = 0.0;
  double report = 0.0;
  /// Gain of the manipulation, or the size of the shortfall.
  double magnitude = 0.0;
};

/// Sorted, deduplicated grid: multiples of step on [0,1] plus `extra` points.
std::vector<double> make_report_grid(double step, std::span<const double> extra = {});

/// Step 0.001 grid refined with the given support and the mechanism's
/// critical points +-1e-6.
std::vector<double> default_report_grid(const Mechanism& mech, std::span<const double> support = {});

struct BestResponse {
  double report = 0.0;
  double gain = 0.0;
};

/// Best report on the grid. Ties go to the truthful report, then the smaller report.
BestResponse best_response(const Mechanism& mech, double true_t, std::span<const double> report_grid,
                           const PerformanceModel& perf);

/// One manipulation report per type that has a deviation gaining more than tol.
std::vector<ViolationReport> check_truthful(const Mechanism& mech, std::span<const double> type_grid,
                                            std::span<const double> report_grid,
                                            const PerformanceModel& perf, double tol = kProfitTol);
std::vector<ViolationReport> check_truthful_serial(const Mechanism& mech,
                                                   std::span<const double> type_grid,
                                                   std::span<const double> report_grid,
                                                   const PerformanceModel& perf,
                                                   double tol = kProfitTol);

/// HR1, HR2 (deterministic) or HR2' (noisy), and HR3 against the budget xi.
std::vector<ViolationReport> check_validity(const Mechanism& mech, const DiscreteDistribution& p,
                                            double xi, const PerformanceModel& perf,
                                            bool deterministic);

/// Lowest realized grade over reports on the grid and samples on a 0.01 grid.
double min_realized_grade(const Mechanism& mech, std::span<const double> report_grid);

/// grade_verified(r, .) is non-decreasing in the sample for every r on the grid.
bool verified_grade_monotone(const Mechanism& mech, std::span<const double> report_grid);

struct NashResult {
  std::vector<std::vector<double>> equilibria;
  /// Agents audited on the path of each equilibrium.
  std::vector<int> verified_counts;
  bool truthful_is_equilibrium = false;
  bool unique = false;
};

inline constexpr int kNashMaxAgents = 6;
inline constexpr int kNashMaxGrid = 6;

/// All pure Nash equilibria of the histogram mechanism with reports on its type grid.
NashResult nash_bruteforce(const HistogramParams& params, const Population& pop);
NashResult nash_bruteforce_serial(const HistogramParams& params, const Population& pop);

/// Profitable unilateral deviations from `profile`, evaluated by rebuilding the
/// histogram mechanism for each deviation.
std::vector<ViolationReport> histogram_deviations(const HistogramParams& params,
                                                  const Population& pop,
                                                  const ReportProfile& profile);

using AuditFn = std::function<double(double report)>;

/// Audit with probability q(r); verified grade R^2(r, s); unverified grade r + z.
Mechanism make_naive_scoring(AuditFn q, double z);

/// Largest profitable manipulation of the naive scoring mechanism on the grid, if any.
std::optional<ViolationReport> naive_failure_demo(AuditFn q, double z, double grid_step);
std::optional<ViolationReport> naive_failure_demo_serial(AuditFn q, double z, double grid_step);

}  // namespace verimech
