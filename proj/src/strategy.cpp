#include "verimech/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace verimech {

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::manipulation:
      return "HR1";
    case ViolationKind::punished_truth:
      return "HR2";
    case ViolationKind::negative_bias:
      return "HR2'";
    case ViolationKind::floor_breach:
      return "HR3";
  }
  return "?";
}

std::vector<double> make_report_grid(double step, std::span<const double> extra) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("grid step must be in (0,1]");
  const long k = std::lround(1.0 / step);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(k) + 1 + extra.size());
  for (long i = 0; i < k; ++i) grid.push_back(static_cast<double>(i) / static_cast<double>(k));
  grid.push_back(1.0);
  for (double x : extra) {
    if (x >= 0.0 && x <= 1.0) grid.push_back(x);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> default_report_grid(const Mechanism& mech, std::span<const double> support) {
  std::vector<double> extra(support.begin(), support.end());
  for (double c : mech.critical_points) {
    extra.push_back(c);
    extra.push_back(c - 1e-6);
    extra.push_back(c + 1e-6);
  }
  return make_report_grid(0.001, extra);
}

BestResponse best_response(const Mechanism& mech, double true_t, std::span<const double> report_grid,
                           const PerformanceModel& perf) {
  const double truthful = expected_grade(mech, true_t, true_t, perf);
  BestResponse best{true_t, 0.0};
  double best_grade = truthful;
  for (double r : report_grid) {
    const double g = expected_grade(mech, true_t, r, perf);
    // Grid is ascending, so a strict improvement keeps the smaller report on ties.
    if (g > best_grade + 1e-12 && g > truthful + kProfitTol) {
      best_grade = g;
      best = {r, g - truthful};
    }
  }
  return best;
}

namespace {

void require_grid(std::span<const double> grid, const char* what) {
  for (double x : grid) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(what) + " outside [0,1]");
  }
}

std::optional<ViolationReport> worst_manipulation(const Mechanism& mech, double t,
                                                  std::span<const double> report_grid,
                                                  const PerformanceModel& perf, double tol) {
  const double truthful = expected_grade(mech, t, t, perf);
  double worst_gain = tol;
  std::optional<ViolationReport> out;
  for (double r : report_grid) {
    const double gain = expected_grade(mech, t, r, perf) - truthful;
    if (gain > worst_gain) {
      worst_gain = gain;
      out = ViolationReport{ViolationKind::manipulation, t, r, gain};
    }
  }
  return out;
}

}  // namespace

std::vector<ViolationReport> check_truthful(const Mechanism& mech, std::span<const double> type_grid,
                                            std::span<const double> report_grid,
                                            const PerformanceModel& perf, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("truthfulness tolerance must be positive");
  require_grid(type_grid, "type grid");
  require_grid(report_grid, "report grid");
  if (type_grid.empty()) return {};
  // Surfaces mechanism/performance incompatibility before the parallel region.
  (void)expected_grade(mech, type_grid.front(), type_grid.front(), perf);

  std::vector<std::optional<ViolationReport>> per_type(type_grid.size());
  const auto count = static_cast<long>(type_grid.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    per_type[idx] = worst_manipulation(mech, type_grid[idx], report_grid, perf, tol);
  }
  std::vector<ViolationReport> out;
  for (auto& v : per_type) {
    if (v) out.push_back(*v);
  }
  return out;
}

std::vector<ViolationReport> check_truthful_serial(const Mechanism& mech,
                                                   std::span<const double> type_grid,
                                                   std::span<const double> report_grid,
                                                   const PerformanceModel& perf, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("truthfulness tolerance must be positive");
  require_grid(type_grid, "type grid");
  require_grid(report_grid, "report grid");
  std::vector<ViolationReport> out;
  for (double t : type_grid) {
    if (auto v = worst_manipulation(mech, t, report_grid, perf, tol)) out.push_back(*v);
  }
  return out;
}

double min_realized_grade(const Mechanism& mech, std::span<const double> report_grid) {
  const auto samples = make_report_grid(0.01);
  double lowest = std::numeric_limits<double>::infinity();
  for (double r : report_grid) {
    const double q = mech.verify_prob(r);
    if (q < 1.0) lowest = std::min(lowest, mech.grade_unverified(r));
    if (q > 0.0) {
      lowest = std::min(lowest, mech.grade_verified(r, r));
      for (double s : samples) lowest = std::min(lowest, mech.grade_verified(r, s));
    }
  }
  return lowest;
}

std::vector<ViolationReport> check_validity(const Mechanism& mech, const DiscreteDistribution& p,
                                            double xi, const PerformanceModel& perf,
                                            bool deterministic) {
  constexpr double tol = kProfitTol;
  std::vector<double> types;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.mass()[i] > 0.0) types.push_back(p.support()[i]);
  }
  const auto grid = default_report_grid(mech, p.support());
  const PerformanceModel used = deterministic ? PerformanceModel::deterministic() : perf;

  std::vector<ViolationReport> out = check_truthful(mech, types, grid, used, tol);

  for (double t : types) {
    const double q = mech.verify_prob(t);
    if (q < 1.0) {
      const double g = mech.grade_unverified(t);
      if (g < t - tol) {
        out.push_back({deterministic ? ViolationKind::punished_truth : ViolationKind::negative_bias,
                       t, t, t - g});
        continue;
      }
    }
    if (deterministic) {
      if (q > 0.0) {
        const double g = mech.grade_verified(t, t);
        if (g < t - tol) out.push_back({ViolationKind::punished_truth, t, t, t - g});
      }
    } else {
      const double g = expected_grade(mech, t, t, used);
      if (g < t - tol) out.push_back({ViolationKind::negative_bias, t, t, t - g});
    }
  }

  // Realized grades are checked on every report, not only the support.
  const double lowest = min_realized_grade(mech, grid);
  if (lowest < -xi - tol) {
    double at = 0.0;
    for (double r : grid) {
      if (min_realized_grade(mech, std::span<const double>(&r, 1)) == lowest) {
        at = r;
        break;
      }
    }
    out.push_back({ViolationKind::floor_breach, at, at, -xi - lowest});
  }
  return out;
}

bool verified_grade_monotone(const Mechanism& mech, std::span<const double> report_grid) {
  const auto samples = make_report_grid(0.01);
  for (double r : report_grid) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double s : samples) {
      const double g = mech.grade_verified(r, s);
      if (g < prev - 1e-12) return false;
      prev = g;
    }
  }
  return true;
}

std::vector<ViolationReport> histogram_deviations(const HistogramParams& params,
                                                  const Population& pop,
                                                  const ReportProfile& profile) {
  if (profile.n() != pop.n()) throw std::invalid_argument("profile length differs from population");
  const auto grid = params.type_grid();
  const PerformanceModel perf = PerformanceModel::deterministic();
  const auto base = make_histogram(params, profile);

  std::vector<ViolationReport> out;
  for (std::size_t i = 0; i < pop.n(); ++i) {
    const double t = pop.types()[i];
    const double current = expected_grade(base.mechanism, t, profile.reports()[i], perf);
    for (double r : grid) {
      std::vector<double> reports = profile.reports();
      reports[i] = r;
      const auto dev = make_histogram(params, ReportProfile(reports));
      const double gain = expected_grade(dev.mechanism, t, r, perf) - current;
      if (gain > kProfitTol) out.push_back({ViolationKind::manipulation, t, r, gain});
    }
  }
  return out;
}

Mechanism make_naive_scoring(AuditFn q, double z) {
  if (!q) throw std::invalid_argument("naive scoring needs an audit function");
  return Mechanism::create(
      "naive-scoring",
      [q](double r) {
        const double v = q(r);
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("audit probability outside [0,1]");
        return v;
      },
      [z](double r) { return r + z; }, [](double r, double s) { return scoring_rule(2.0, r, s); },
      0.0, true);
}

namespace {

std::optional<ViolationReport> best_of(std::vector<std::optional<ViolationReport>>& found) {
  std::optional<ViolationReport> best;
  for (auto& v : found) {
    if (v && (!best || v->magnitude > best->magnitude)) best = v;
  }
  return best;
}

}  // namespace

std::optional<ViolationReport> naive_failure_demo(AuditFn q, double z, double grid_step) {
  const Mechanism mech = make_naive_scoring(std::move(q), z);
  const auto grid = make_report_grid(grid_step);
  const PerformanceModel perf = PerformanceModel::deterministic();
  for (double r : grid) (void)mech.verify_prob(r);

  std::vector<std::optional<ViolationReport>> per_type(grid.size());
  const auto count = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    per_type[idx] = worst_manipulation(mech, grid[idx], grid, perf, kProfitTol);
  }
  return best_of(per_type);
}

std::optional<ViolationReport> naive_failure_demo_serial(AuditFn q, double z, double grid_step) {
  const Mechanism mech = make_naive_scoring(std::move(q), z);
  const auto grid = make_report_grid(grid_step);
  const PerformanceModel perf = PerformanceModel::deterministic();
  std::vector<std::optional<ViolationReport>> per_type;
  for (double t : grid) per_type.push_back(worst_manipulation(mech, t, grid, perf, kProfitTol));
  return best_of(per_type);
}

}  // namespace verimech
