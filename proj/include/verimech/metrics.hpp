#pragma once

#include <vector>

#include "verimech/core.hpp"

namespace verimech {

/// Bias of the cutoff gamma on p: sum over t <= gamma of p(t) * (gamma - t).
double bias_fn(double gamma, const DiscreteDistribution& p);

/// Verification rate of the cutoff gamma: sum over t > gamma of p(t) * (t - gamma) / (t + xi).
double ver_fn(double gamma, double xi, const DiscreteDistribution& p);

/// Largest gamma in [0,1] with bias_fn(gamma, p) <= beta.
///
/// bias_fn is continuous, non-decreasing and piecewise linear with breakpoints
/// at the support, so the crossing segment is inverted in closed form.
double gamma_of_beta(double beta, const DiscreteDistribution& p);

/// Expected fraction of truthful agents audited.
double mech_ver(const Mechanism& mech, const DiscreteDistribution& p);
/// Expected over-grading of a truthful agent.
double mech_bias(const Mechanism& mech, const DiscreteDistribution& p,
                 const PerformanceModel& perf = PerformanceModel::deterministic());
/// Worst over-grading over types with positive mass.
double mech_maxbias(const Mechanism& mech, const DiscreteDistribution& p,
                    const PerformanceModel& perf = PerformanceModel::deterministic());

struct BiasVer {
  double bias = 0.0;
  double ver = 0.0;
};

/// Bias and verification of the agent-specific MCV on a truthful population.
BiasVer asmcv_metrics(double beta, const Population& pop, double xi);

struct CurvePoint {
  double param = 0.0;
  double bias = 0.0;
  double ver = 0.0;
  /// Parameter was clipped (PV theta* > 1).
  bool flagged = false;
};

struct Curve {
  std::vector<CurvePoint> points;
};

/// Cutoff grid 0, step, 2*step, ..., 1. step must divide 1.
std::vector<double> gamma_grid(double step);

/// Default PV kappa set {1..15, 20, 50}.
std::vector<int> default_kappas();

Curve sweep_mcv(const DiscreteDistribution& p, double xi, double gamma_step);
Curve sweep_mcv_serial(const DiscreteDistribution& p, double xi, double gamma_step);

/// PV with theta = min(theta_star(xi, kappa), 1) for each kappa.
Curve sweep_pv(const DiscreteDistribution& p, double xi, const std::vector<int>& kappas);
Curve sweep_pv_serial(const DiscreteDistribution& p, double xi, const std::vector<int>& kappas);

}  // namespace verimech
